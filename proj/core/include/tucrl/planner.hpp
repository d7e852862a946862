#pragma once

#include "tucrl/plausible_set.hpp"

namespace tucrl {

/// Output of truncated extended value iteration: the optimistic gain is the
/// midpoint of the extreme one-step differences at termination, `h` is the
/// iterate the greedy policy was computed from, and the policy is greedy
/// with respect to `h` on the planned states.
struct PlanResult {
    double gain = 0.0;
    numvec h;
    indvec policy;
    long n_iters = 0;
    bool converged = false;
    bool used_aperiodicity_mix = false;
};

struct BellmanResult {
    numvec values;
    indvec greedy;
};

/// One application of the optimistic Bellman operator on `states`:
/// v'(s) = max_a { upper reward endpoint + max_p p^T v } with the inner
/// maximization dispatched on the set's variant. Entries outside `states`
/// are copied through.
BellmanResult bellman_apply(const numvec& v, const PlausibleSet& set, const indvec& states);

/// The transition vector attaining the inner maximum for one pair, built
/// from the public inner maximizers on dense materializations.
numvec inner_argmax(const PlausibleSet& set, int s, int a, const numvec& v);

struct TeviOptions {
    long max_iters = 1'000'000;
    long plain_iters_before_mix = 10'000;
    double mix = 0.99;  // aperiodicity transform coefficient
};

/// Truncated extended value iteration with span stopping over `states`.
/// Starts from v0 (zeros when empty) and iterates until
/// sp(v_{n+1} - v_n) <= eps; the gain is the midpoint of the extreme
/// differences. Throws MaxIterationsExceeded when the cap is reached.
PlanResult tevi(const numvec& v0, const PlausibleSet& set, const indvec& states, double eps,
                const TeviOptions& opt = {});

/// Minimal expected hitting times to `target` in the extended MDP (the
/// inner choice minimizes travel time within the set). Requires the target
/// inside the set's communicating estimate; optimistically unreachable
/// states get +infinity.
numvec extended_shortest_path(const PlausibleSet& set, int target);

}  // namespace tucrl
