#pragma once

#include "tucrl/mdp.hpp"
#include "tucrl/types.hpp"

namespace tucrl {

/// Minimal expected hitting time to `target` over stationary deterministic
/// policies, per source state. States from which no policy reaches the
/// target almost surely get +infinity. Finite entries satisfy the fixed
/// point tau(s) = min_a { 1 + sum_s' p(s'|s,a) tau(s') } within 1e-9.
numvec shortest_path(const Mdp& mdp, int target);

/// Longest shortest path over all ordered state pairs; +infinity when some
/// pair is not connected.
double diameter(const Mdp& mdp);

}  // namespace tucrl
