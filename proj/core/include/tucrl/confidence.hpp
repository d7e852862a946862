#pragma once

#include "tucrl/counts.hpp"
#include "tucrl/plausible_set.hpp"

namespace tucrl {

/// Logarithmic factor b_{k,delta} = ln(2 S A t_k / delta).
double log_term(int num_states, int max_actions, long t_k, double delta);

/// Empirical-Bernstein reward bound:
/// sqrt(14 var b / N+) + (49/3) r_max b / N±, scaled by `shrink`.
double beta_r(const Counts& counts, const EmpiricalModel& model, int s, int a, double delta,
              double r_max, double shrink = 1.0);

/// Empirical-Bernstein transition bound for one next state:
/// sqrt(14 p(1-p) b / N+) + (49/3) b / N±, scaled by `shrink`.
double beta_p(const Counts& counts, const EmpiricalModel& model, int s, int a, int next,
              double delta, double shrink = 1.0);

/// Upper-cap slack for truncated pairs under the zeta variant:
/// |S^T_k| * min{1, (49/3) b / N±}.
double zeta_slack(const Counts& counts, int s, int a, int n_transient, double delta,
                  double shrink = 1.0);

struct SetOptions {
    double r_max = 1.0;
    double shrink_r = 1.0;
    double shrink_p = 1.0;
    int current_state = -1;  // added to the communicating-set estimate
};

/// Builds the plausible set for the episode opened in `counts`. The
/// communicating-set estimate is `{s : sum_a N(s,a) > 0} + current_state`;
/// a pair with a visited state is truncated when N±(s,a) > sqrt(t_k / (S A)).
PlausibleSet plausible_set(const Counts& counts, const EmpiricalModel& model, double delta,
                           SetVariant variant, const SetOptions& opt);

}  // namespace tucrl
