#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "tucrl/counts.hpp"

using namespace tucrl;

TEST_CASE("single sample: mean visible immediately, zero variance") {
    Counts counts(2, {1, 1});
    EmpiricalModel model(2, {1, 1}, 1.0);
    counts.start_episode();
    record(counts, model, 0, 0, 0.5, 1);
    CHECK(model.r_hat(0, 0) == 0.5);
    CHECK(model.var_r(0, 0) == 0.0);
    CHECK(counts.nu(0, 0) == 1);
    CHECK(counts.N(0, 0) == 0);  // committed only at episode end
    counts.end_episode();
    CHECK(counts.N(0, 0) == 1);
    CHECK(counts.nu(0, 0) == 0);
}

TEST_CASE("two samples 0.2 and 0.8: population variance 0.09") {
    Counts counts(2, {1, 1});
    EmpiricalModel model(2, {1, 1}, 1.0);
    counts.start_episode();
    record(counts, model, 0, 0, 0.2, 1);
    record(counts, model, 0, 0, 0.8, 1);
    CHECK(model.r_hat(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(model.var_r(0, 0) == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(model.p_hat(counts, 0, 0, 1) == 1.0);  // degenerate frequency
    CHECK(model.var_p(counts, 0, 0, 1) == 0.0);
}

TEST_CASE("counter identities: N+ and N±, transition sums") {
    Counts counts(3, {2, 1, 1});
    EmpiricalModel model(3, {2, 1, 1}, 1.0);
    CHECK(counts.N_plus(0, 0) == 1);
    CHECK(counts.N_pm(0, 0) == 1);
    counts.start_episode();
    record(counts, model, 0, 0, 0.1, 1);
    record(counts, model, 1, 0, 0.2, 2);
    record(counts, model, 2, 0, 0.3, 0);
    record(counts, model, 0, 1, 0.4, 2);
    counts.end_episode();
    CHECK(counts.N(0, 0) == 1);
    CHECK(counts.N_pm(0, 0) == 1);  // max(1, N-1)
    long total = 0;
    for (int next = 0; next < 3; ++next) total += counts.trans(0, 0, next);
    CHECK(total == counts.N(0, 0));
    CHECK(counts.t() == 5);
    CHECK(counts.state_visited(0));
    CHECK(counts.observed(0, 0) == indvec{1});
}

TEST_CASE("index errors are reported") {
    Counts counts(2, {1, 1});
    EmpiricalModel model(2, {1, 1}, 1.0);
    counts.start_episode();
    CHECK_THROWS_AS(counts.record_step(2, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(counts.record_step(0, 1, 0), std::out_of_range);
    CHECK_THROWS_AS(model.record_reward(0, 0, 1.5), std::invalid_argument);
}

TEST_CASE("episode bookkeeping matches the run protocol") {
    Counts counts(2, {1, 1});
    CHECK(counts.t() == 1);
    CHECK(counts.episode() == 0);
    counts.start_episode();
    CHECK(counts.episode() == 1);
    CHECK(counts.episode_start() == 1);
    counts.record_step(0, 0, 1);
    counts.record_step(1, 0, 0);
    counts.end_episode();
    counts.start_episode();
    CHECK(counts.episode() == 2);
    CHECK(counts.episode_start() == 3);
}

TEST_CASE("counts snapshot exports as CSV") {
    Counts counts(2, {1, 1});
    EmpiricalModel model(2, {1, 1}, 1.0);
    counts.start_episode();
    record(counts, model, 0, 0, 0.5, 1);
    record(counts, model, 1, 0, 0.5, 1);
    record(counts, model, 1, 0, 0.5, 0);
    counts.end_episode();
    std::ostringstream out;
    counts.write_csv(out);
    CHECK(out.str() ==
          "s,a,s_next,count\n"
          "0,0,1,1\n"
          "1,0,0,1\n"
          "1,0,1,1\n");
}
