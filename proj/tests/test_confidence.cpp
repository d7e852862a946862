#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tucrl/agent.hpp"
#include "tucrl/confidence.hpp"
#include "tucrl/envs.hpp"

using namespace tucrl;

TEST_CASE("beta_r on a fresh pair matches the closed form (49/3) ln 8") {
    // S = 2, A = 2, t_k = 1, delta = 1, r_max = 1, no samples
    Counts counts(2, {2, 2});
    EmpiricalModel model(2, {2, 2}, 1.0);
    counts.start_episode();
    const double expected = (49.0 / 3.0) * std::log(8.0);
    CHECK(beta_r(counts, model, 0, 0, 1.0, 1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(33.96).epsilon(1e-3));
    // the reward interval is clipped into [0, r_max]
    SetOptions opt;
    opt.current_state = 0;
    const PlausibleSet set = plausible_set(counts, model, 1.0, SetVariant::bernstein_per_element, opt);
    CHECK(set.r_lo[std::size_t(set.pair_index(0, 0))] == 0.0);
    CHECK(set.r_hi[std::size_t(set.pair_index(0, 0))] == 1.0);
}

TEST_CASE("beta_p for a never-observed transition keeps only the second term") {
    Counts counts(2, {2, 2});
    EmpiricalModel model(2, {2, 2}, 1.0);
    counts.start_episode();
    for (int i = 0; i < 10; ++i) record(counts, model, 0, 0, 0.5, 0);
    counts.end_episode();
    counts.start_episode();
    const double b = log_term(2, 2, counts.episode_start(), 0.1);
    CHECK(beta_p(counts, model, 0, 0, 1, 0.1) ==
          doctest::Approx((49.0 / 3.0) * b / 9.0).epsilon(1e-12));
}

TEST_CASE("bounds shrink linearly with the shrink factor and vanish as N grows") {
    Counts counts(2, {2, 2});
    EmpiricalModel model(2, {2, 2}, 1.0);
    counts.start_episode();
    for (int i = 0; i < 50; ++i) record(counts, model, 0, 0, (i % 2) ? 0.9 : 0.1, 1);
    counts.end_episode();
    counts.start_episode();
    const double full = beta_r(counts, model, 0, 0, 0.05, 1.0, 1.0);
    CHECK(beta_r(counts, model, 0, 0, 0.05, 1.0, 0.05) == doctest::Approx(0.05 * full));

    // monotone in the visit counters: more data, smaller bound
    Counts more(2, {2, 2});
    EmpiricalModel more_model(2, {2, 2}, 1.0);
    more.start_episode();
    for (int i = 0; i < 500; ++i) record(more, more_model, 0, 0, (i % 2) ? 0.9 : 0.1, 1);
    more.end_episode();
    more.start_episode();
    // evaluate at the same t_k by rebuilding a fresh episode clock
    CHECK(beta_r(more, more_model, 0, 0, 0.05, 1.0) < full);
    CHECK(beta_p(more, more_model, 0, 0, 1, 0.05) < beta_p(counts, model, 0, 0, 1, 0.05));
}

TEST_CASE("zeta slack: empty transient set, caps, and direct arithmetic") {
    Counts counts(2, {2, 2});
    EmpiricalModel model(2, {2, 2}, 1.0);
    counts.start_episode();
    CHECK(zeta_slack(counts, 0, 0, 0, 0.05) == 0.0);
    // N± = 1 and a small t: each term caps at 1
    CHECK(zeta_slack(counts, 0, 0, 2, 0.05) == 2.0);
}

TEST_CASE("zeta slack formula at N± = 100, b = 3, two transient states") {
    // pick delta so that ln(2 S A t_k / delta) = 3 with S = A = 2, t_k = 1
    const double delta = 8.0 / std::exp(3.0);
    Counts counts(2, {2, 2});
    EmpiricalModel model(2, {2, 2}, 1.0);
    counts.start_episode();
    for (int i = 0; i < 101; ++i) record(counts, model, 0, 0, 0.5, 1);
    counts.end_episode();
    counts.start_episode();
    REQUIRE(counts.N_pm(0, 0) == 100);
    // t_k moved past 1, so evaluate the log factor the same way the
    // implementation does and compare against the hand formula
    const double b = log_term(2, 2, counts.episode_start(), delta);
    CHECK(zeta_slack(counts, 0, 0, 2, delta) ==
          doctest::Approx(2.0 * (49.0 / 3.0) * b / 100.0).epsilon(1e-12));
    CHECK(2.0 * (49.0 / 3.0) * 3.0 / 100.0 == doctest::Approx(0.98).epsilon(1e-12));
}

TEST_CASE("with no unvisited states the truncated variants equal the plain set") {
    Rng gen(61);
    const Mdp mdp = oracles::random_dense_mdp(3, 2, gen);
    Counts counts(mdp);
    EmpiricalModel model(mdp);
    Rng rng(62);
    oracles::random_walk_stats(mdp, 400, rng, counts, model);

    SetOptions opt;
    opt.current_state = 0;
    const PlausibleSet plain =
        plausible_set(counts, model, 0.05, SetVariant::bernstein_per_element, opt);
    const PlausibleSet trunc = plausible_set(counts, model, 0.05, SetVariant::truncated, opt);
    REQUIRE(int(plain.comm.size()) == mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < 2; ++a) {
            CHECK(plain.lower_caps(s, a) == trunc.lower_caps(s, a));
            CHECK(plain.upper_caps(s, a) == trunc.upper_caps(s, a));
        }
}

TEST_CASE("under-explored pairs keep their full support in truncated sets") {
    // one visited state pair with many visits (masked) and one with few (in K)
    Counts counts(3, {1, 1, 1});
    EmpiricalModel model(3, {1, 1, 1}, 1.0);
    counts.start_episode();
    for (int i = 0; i < 200; ++i) record(counts, model, 0, 0, 0.5, 1);
    record(counts, model, 1, 0, 0.5, 0);
    counts.end_episode();
    counts.start_episode();
    SetOptions opt;
    opt.current_state = 0;
    const PlausibleSet set = plausible_set(counts, model, 0.05, SetVariant::truncated, opt);
    // state 2 is the transient estimate
    CHECK(set.in_comm[2] == 0);
    const double thresh = std::sqrt(double(counts.episode_start()) / 3.0);
    REQUIRE(double(counts.N_pm(0, 0)) > thresh);   // masked
    REQUIRE(double(counts.N_pm(1, 0)) <= thresh);  // in K
    CHECK(set.rows[std::size_t(set.pair_index(0, 0))].masked);
    CHECK(!set.rows[std::size_t(set.pair_index(1, 0))].masked);
    CHECK(set.upper_caps(0, 0)[2] == 0.0);
    CHECK(set.upper_caps(1, 0)[2] > 0.0);
    // planning proposal covers the full space while K is nonempty
    CHECK(int(set.plan_states.size()) == 3);
}

TEST_CASE("per-element membership implies l1 membership (relaxation inclusion)") {
    Rng rng(63);
    for (int trial = 0; trial < 20; ++trial) {
        const Mdp mdp = oracles::random_dense_mdp(4, 2, rng);
        Counts counts(mdp);
        EmpiricalModel model(mdp);
        oracles::random_walk_stats(mdp, 300, rng, counts, model);
        SetOptions opt;
        opt.current_state = 0;
        const PlausibleSet box =
            plausible_set(counts, model, 0.05, SetVariant::bernstein_per_element, opt);
        const PlausibleSet ball = plausible_set(counts, model, 0.05, SetVariant::l1_relaxed, opt);
        // sample box points and check the l1 radius
        for (int s = 0; s < 4; ++s)
            for (int a = 0; a < 2; ++a) {
                const numvec lo = box.lower_caps(s, a);
                const numvec hi = box.upper_caps(s, a);
                const numvec c = ball.center(s, a);
                for (int rep = 0; rep < 5; ++rep) {
                    numvec p(4);
                    double total = 0.0;
                    for (int u = 0; u < 4; ++u) {
                        p[std::size_t(u)] =
                            lo[std::size_t(u)] +
                            rng.uniform01() * (hi[std::size_t(u)] - lo[std::size_t(u)]);
                        total += p[std::size_t(u)];
                    }
                    if (total <= 0.0) continue;
                    for (double& x : p) x /= total;  // project roughly onto the simplex
                    bool inside_box = true;
                    double dist = 0.0;
                    for (int u = 0; u < 4; ++u) {
                        if (p[std::size_t(u)] < lo[std::size_t(u)] - 1e-12 ||
                            p[std::size_t(u)] > hi[std::size_t(u)] + 1e-12)
                            inside_box = false;
                        dist += std::abs(p[std::size_t(u)] - c[std::size_t(u)]);
                    }
                    if (inside_box) CHECK(dist <= ball.l1_radius(s, a) + 1e-9);
                }
            }
    }
}

TEST_CASE("coverage: the true MDP stays inside the per-element set") {
    // 100 seeded short runs, un-shrunk bounds, delta = 0.05; the set must
    // contain the true model in every episode for at least 95 of them.
    const Mdp env = make_three_state(0.0);
    const EnvAnalysis analysis = analyze_env(env);
    int covered_runs = 0;
    for (int seed = 0; seed < 100; ++seed) {
        AgentConfig cfg;
        cfg.algorithm = Algorithm::tucrl;
        cfg.delta = 0.05;
        cfg.seed = std::uint64_t(seed);
        const RunLog log = run_agent(env, cfg, 2000, &analysis);
        bool all = true;
        for (const EpisodeRecord& er : log.episodes) all = all && er.in_untruncated;
        if (all) ++covered_runs;
    }
    CHECK(covered_runs >= 95);
}

TEST_CASE("membership check agrees with the dense set predicate") {
    Rng rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        const Mdp mdp = oracles::random_dense_mdp(3, 2, rng);
        Counts counts(mdp);
        EmpiricalModel model(mdp);
        oracles::random_walk_stats(mdp, 100 + int(rng.below(200)), rng, counts, model);
        SetOptions opt;
        opt.current_state = 0;
        const PlausibleSet set =
            plausible_set(counts, model, 0.05, SetVariant::bernstein_per_element, opt);
        CHECK(set.contains(mdp) == bernstein_membership(mdp, counts, model, 0.05, 1.0, 1.0));
    }
}
