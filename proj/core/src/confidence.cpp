#include "tucrl/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tucrl {

double log_term(int num_states, int max_actions, long t_k, double delta) {
    if (t_k < 1) throw std::invalid_argument("log_term: t_k must be >= 1");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("log_term: delta must lie in (0, 1]");
    return std::log(2.0 * num_states * max_actions * double(t_k) / delta);
}

double beta_r(const Counts& counts, const EmpiricalModel& model, int s, int a, double delta,
              double r_max, double shrink) {
    const double b = log_term(counts.num_states(), counts.max_actions(), counts.episode_start(),
                              delta);
    const double first = std::sqrt(14.0 * model.var_r(s, a) * b / double(counts.N_plus(s, a)));
    const double second = (49.0 / 3.0) * r_max * b / double(counts.N_pm(s, a));
    return shrink * (first + second);
}

double beta_p(const Counts& counts, const EmpiricalModel& model, int s, int a, int next,
              double delta, double shrink) {
    const double b = log_term(counts.num_states(), counts.max_actions(), counts.episode_start(),
                              delta);
    const double first =
        std::sqrt(14.0 * model.var_p(counts, s, a, next) * b / double(counts.N_plus(s, a)));
    const double second = (49.0 / 3.0) * b / double(counts.N_pm(s, a));
    return shrink * (first + second);
}

double zeta_slack(const Counts& counts, int s, int a, int n_transient, double delta,
                  double shrink) {
    if (n_transient == 0) return 0.0;
    const double b = log_term(counts.num_states(), counts.max_actions(), counts.episode_start(),
                              delta);
    const double p_plus = std::min(1.0, shrink * (49.0 / 3.0) * b / double(counts.N_pm(s, a)));
    return double(n_transient) * p_plus;
}

PlausibleSet plausible_set(const Counts& counts, const EmpiricalModel& model, double delta,
                           SetVariant variant, const SetOptions& opt) {
    const int n = counts.num_states();
    const int A = counts.max_actions();
    const long t_k = counts.episode_start();
    const double b = log_term(n, A, t_k, delta);
    const double threshold = std::sqrt(double(t_k) / (double(n) * double(A)));

    PlausibleSet set;
    set.variant = variant;
    set.num_states = n;
    set.r_max = opt.r_max;
    set.actions_per_state.resize(std::size_t(n));
    set.pair_offset.resize(std::size_t(n));
    int pairs = 0;
    for (int s = 0; s < n; ++s) {
        set.actions_per_state[std::size_t(s)] = counts.num_actions(s);
        set.pair_offset[std::size_t(s)] = pairs;
        pairs += counts.num_actions(s);
    }
    set.r_lo.resize(std::size_t(pairs));
    set.r_hi.resize(std::size_t(pairs));
    set.rows.resize(std::size_t(pairs));

    set.in_comm.assign(std::size_t(n), 0);
    for (int s = 0; s < n; ++s)
        if (counts.state_visited(s) || s == opt.current_state) {
            set.in_comm[std::size_t(s)] = 1;
            set.comm.push_back(s);
        }
    const int n_transient = n - int(set.comm.size());
    const bool truncating = variant != SetVariant::bernstein_per_element;

    bool any_open_pair = false;  // some pair still admits transitions to new states
    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < counts.num_actions(s); ++a) {
            const auto i = std::size_t(counts.pair_index(s, a));
            const double br = beta_r(counts, model, s, a, delta, opt.r_max, opt.shrink_r);
            const double rhat = model.r_hat(s, a);
            set.r_lo[i] = std::max(0.0, rhat - br);
            set.r_hi[i] = std::min(opt.r_max, rhat + br);

            PlausibleRow& row = set.rows[i];
            row.observed = counts.observed(s, a);
            row.p_hat.resize(row.observed.size());
            row.beta.resize(row.observed.size());
            double beta_sum = 0.0;
            for (std::size_t j = 0; j < row.observed.size(); ++j) {
                row.p_hat[j] = model.p_hat(counts, s, a, row.observed[j]);
                row.beta[j] = beta_p(counts, model, s, a, row.observed[j], delta, opt.shrink_p);
                beta_sum += row.beta[j];
            }
            row.beta_base =
                opt.shrink_p * (49.0 / 3.0) * b / double(counts.N_pm(s, a));
            row.radius = beta_sum + double(n - int(row.observed.size())) * row.beta_base;
            row.unvisited = counts.N(s, a) == 0;

            const bool in_k = set.in_comm[std::size_t(s)] &&
                              double(counts.N_pm(s, a)) <= threshold;
            row.masked = truncating && set.in_comm[std::size_t(s)] && !in_k;
            if (in_k && n_transient > 0) any_open_pair = true;
            if (variant == SetVariant::zeta_relaxed && row.masked)
                row.zeta = zeta_slack(counts, s, a, n_transient, delta, opt.shrink_p);
        }
    }

    if (!truncating) {
        for (int s = 0; s < n; ++s) set.plan_states.push_back(s);
    } else if (any_open_pair) {
        for (int s = 0; s < n; ++s) set.plan_states.push_back(s);
    } else {
        set.plan_states = set.comm;
    }
    return set;
}

}  // namespace tucrl
