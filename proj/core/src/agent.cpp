#include "tucrl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "tucrl/gain_bias.hpp"

namespace tucrl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

const char* algorithm_name(Algorithm algo) {
    return algo == Algorithm::ucrl ? "ucrl" : "tucrl";
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "ucrl") return Algorithm::ucrl;
    if (name == "tucrl") return Algorithm::tucrl;
    throw std::invalid_argument("unknown algorithm: " + name);
}

const char* stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::doubling: return "doubling";
        case StopReason::new_state: return "new_state";
        case StopReason::horizon: return "horizon";
    }
    return "horizon";
}

EnvAnalysis analyze_env(const Mdp& env) {
    EnvAnalysis out;
    out.decomp = decompose(env, env.start_state());
    out.g_star = optimal_gain_bias(env).gain();
    return out;
}

double exploration_threshold(double comm_diameter, int num_states, int max_actions,
                             int n_transient, long t_k, double delta) {
    if (n_transient == 0) return 0.0;
    const double b = std::log(2.0 * num_states * max_actions * double(t_k) / delta);
    const double factor = double(n_transient) * b;
    return (2401.0 / 9.0) * comm_diameter * comm_diameter * double(num_states) *
           double(max_actions) * factor * factor;
}

bool bernstein_membership(const Mdp& truth, const Counts& counts, const EmpiricalModel& model,
                          double delta, double shrink_r, double shrink_p) {
    const double tol = 1e-12;
    for (int s = 0; s < truth.num_states(); ++s) {
        for (int a = 0; a < truth.num_actions(s); ++a) {
            const double br =
                beta_r(counts, model, s, a, delta, truth.r_max(), shrink_r);
            if (std::abs(model.r_hat(s, a) - truth.reward_mean(s, a)) > br + tol) return false;
            // Entries outside both the observed and the true support match
            // trivially (p_hat = p = 0).
            auto check = [&](int next) {
                const double bp = beta_p(counts, model, s, a, next, delta, shrink_p);
                return std::abs(model.p_hat(counts, s, a, next) - truth.transition(s, a, next)) <=
                       bp + tol;
            };
            for (int next : counts.observed(s, a))
                if (!check(next)) return false;
            for (int next : truth.support(s, a))
                if (!check(next)) return false;
        }
    }
    return true;
}

RunLog run_agent(const Mdp& env, const AgentConfig& cfg, long horizon,
                 const EnvAnalysis* analysis) {
    if (horizon < 1) throw std::invalid_argument("run_agent: horizon must be >= 1");
    const int n = env.num_states();
    const int A = env.max_actions();
    const double r_max = env.r_max();

    EnvAnalysis local;
    if (analysis == nullptr && cfg.instrument) {
        local = analyze_env(env);
        analysis = &local;
    }

    Counts counts(env);
    EmpiricalModel model(env);
    Rng trans_rng(splitmix64(cfg.seed * 2));
    Rng reward_rng(splitmix64(cfg.seed * 2 + 1));

    RunLog log;
    log.agent = algorithm_name(cfg.algorithm);
    log.seed = cfg.seed;
    log.delta = cfg.delta;
    log.horizon = horizon;
    log.num_states = n;
    log.max_actions = A;
    log.r_max = r_max;
    if (analysis != nullptr) {
        log.n_comm_true = int(analysis->decomp.comm.size());
        log.comm_diameter = analysis->decomp.comm_diameter;
        log.g_star = analysis->g_star;
    }
    log.steps.reserve(std::size_t(horizon));

    int s = env.start_state();

    while (counts.t() <= horizon) {
        counts.start_episode();
        const long t_k = counts.episode_start();

        int n_visited = 0;
        for (int u = 0; u < n; ++u)
            if (counts.state_visited(u) || u == s) ++n_visited;
        const int n_transient_est = n - n_visited;

        SetVariant variant = SetVariant::bernstein_per_element;
        if (cfg.algorithm == Algorithm::tucrl && n_transient_est > 0)
            variant = cfg.tucrl_variant;

        SetOptions opt;
        opt.r_max = r_max;
        opt.shrink_r = cfg.shrink_r;
        opt.shrink_p = cfg.shrink_p;
        opt.current_state = s;
        const PlausibleSet set = plausible_set(counts, model, cfg.delta, variant, opt);

        const double eps_k = cfg.eps_scale * r_max / std::sqrt(double(t_k));
        PlanResult plan;
        try {
            TeviOptions topt;
            topt.max_iters = cfg.planner_max_iters;
            plan = tevi({}, set, set.plan_states, eps_k, topt);
        } catch (const MaxIterationsExceeded& e) {
            throw MaxIterationsExceeded("episode " + std::to_string(counts.episode()) + ": " +
                                        e.what());
        }

        EpisodeRecord er;
        er.k = counts.episode();
        er.t_k = t_k;
        er.start_state = s;
        er.n_comm = int(set.comm.size());
        const double threshold = std::sqrt(double(t_k) / (double(n) * double(A)));
        for (int u : set.comm)
            for (int a = 0; a < env.num_actions(u); ++a)
                if (double(counts.N_pm(u, a)) <= threshold) ++er.n_under;
        er.plan_full = int(set.plan_states.size()) == n;
        er.g_tilde = plan.gain;
        er.eps_k = eps_k;
        er.span_h_comm = span_over(plan.h, set.comm);
        er.planner_mixed = plan.used_aperiodicity_mix;
        if (cfg.instrument && analysis != nullptr) {
            er.in_untruncated =
                bernstein_membership(env, counts, model, cfg.delta, cfg.shrink_r, cfg.shrink_p);
            er.sufficiently_explored =
                double(t_k) >= exploration_threshold(analysis->decomp.comm_diameter, n, A,
                                                     n_transient_est, t_k, cfg.delta);
        }

        // Execute the optimistic policy (Fig. 1 loop). At least one action
        // is taken per episode; TUCRL additionally stops when the current
        // state had no visits at the episode start.
        StopReason reason = StopReason::horizon;
        double delta_k = 0.0;
        while (true) {
            const long t = counts.t();
            if (t > horizon) {
                reason = StopReason::horizon;
                break;
            }
            if (t != t_k) {
                if (cfg.algorithm == Algorithm::tucrl && !counts.state_visited(s)) {
                    reason = StopReason::new_state;
                    break;
                }
                const int a_next = plan.policy[std::size_t(s)];
                if (counts.nu(s, a_next) >= counts.N_plus(s, a_next)) {
                    reason = StopReason::doubling;
                    break;
                }
            }
            const int a = plan.policy[std::size_t(s)];
            const double r = env.sample_reward(s, a, reward_rng);
            const int next = env.sample_next(s, a, trans_rng);
            const bool under =
                double(counts.N_pm(s, a)) <= std::sqrt(double(t) / (double(n) * double(A)));
            log.steps.push_back(StepRecord{t, er.k, s, a, r, next, under});
            if (analysis != nullptr) delta_k += analysis->g_star - env.reward_mean(s, a);
            record(counts, model, s, a, r, next);
            s = next;
        }
        er.steps = counts.t() - t_k;
        er.reason = reason;
        er.delta_k = delta_k;
        log.episodes.push_back(er);
        counts.end_episode();
    }
    return log;
}

numvec regret_curve(const RunLog& run, double g_star) {
    if (long(run.steps.size()) != run.horizon)
        throw std::invalid_argument("regret_curve: trace length does not match the horizon");
    numvec out(run.steps.size());
    double total = 0.0;
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        total += run.steps[i].r;
        out[i] = double(i + 1) * g_star - total;
    }
    return out;
}

Diagnostics diagnostics(const RunLog& run) {
    Diagnostics d;
    const double sc = double(run.n_comm_true);
    const double a = double(run.max_actions);
    const double t = double(run.horizon);
    d.z_bound = 2.0 * std::sqrt(sc * a * t) + 2.0 * sc * a;
    d.episode_bound = 1.0 + 2.0 * sc * a + sc * a * std::log2(t / (sc * a)) + sc;
    d.episodes = long(run.episodes.size());

    // Replay the trace: committed counts at episode starts, per-episode
    // visit counts, and the under-exploration flags.
    const int pairs = run.num_states * run.max_actions;
    std::vector<long> committed(std::size_t(pairs), 0), nu(std::size_t(pairs), 0);
    int cur_k = run.steps.empty() ? 0 : run.steps.front().k;
    auto close_episode = [&]() {
        for (int i = 0; i < pairs; ++i) {
            if (nu[std::size_t(i)] > std::max(1L, committed[std::size_t(i)]))
                ++d.stopping_violations;
            committed[std::size_t(i)] += nu[std::size_t(i)];
            nu[std::size_t(i)] = 0;
        }
    };
    for (const StepRecord& step : run.steps) {
        if (step.k != cur_k) {
            close_episode();
            cur_k = step.k;
        }
        const int idx = step.s * run.max_actions + step.a;
        const double thresh =
            std::sqrt(double(step.t) / (double(run.num_states) * double(run.max_actions)));
        if (double(std::max(1L, committed[std::size_t(idx)] - 1)) <= thresh) ++d.z_t;
        ++nu[std::size_t(idx)];
    }
    close_episode();

    const bool tucrl = run.agent == "tucrl";
    for (const EpisodeRecord& er : run.episodes) {
        if (er.in_untruncated && er.sufficiently_explored &&
            er.g_tilde < run.g_star - er.eps_k - 1e-9)
            ++d.optimism_violations;
        if (tucrl && er.in_untruncated &&
            er.span_h_comm > run.r_max * run.comm_diameter + er.eps_k + 1e-9)
            ++d.span_violations;
    }
    return d;
}

void RunLog::write_steps_csv(std::ostream& out) const {
    out << "t,k,s,a,r,s_next\n";
    char buf[32];
    for (const StepRecord& st : steps) {
        std::snprintf(buf, sizeof(buf), "%.12g", st.r);
        out << st.t << ',' << st.k << ',' << st.s << ',' << st.a << ',' << buf << ',' << st.next
            << "\n";
    }
}

void RunLog::write_episodes_csv(std::ostream& out) const {
    out << "k,t_k,SCk,Kk,g_tilde,delta_k,reason\n";
    char g[32], dk[32];
    for (const EpisodeRecord& er : episodes) {
        std::snprintf(g, sizeof(g), "%.12g", er.g_tilde);
        std::snprintf(dk, sizeof(dk), "%.12g", er.delta_k);
        out << er.k << ',' << er.t_k << ',' << er.n_comm << ',' << er.n_under << ',' << g << ','
            << dk << ',' << stop_reason_name(er.reason) << "\n";
    }
}

}  // namespace tucrl
