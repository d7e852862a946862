#pragma once

#include "tucrl/types.hpp"

namespace tucrl {

/// Maximizes p^T v over the distributions supported on `support` within an
/// l1 ball of the given radius around p_hat: the best state is raised by
/// half the radius (capped at 1) and the residual mass is drained from the
/// worst states. Ties in v are broken by lower state index; draining
/// processes the sorted order in reverse. Entries outside `support` are
/// zero in the result.
///
/// Requires sum of p_hat over `support` equal to 1 (within 1e-9).
numvec otp(const numvec& p_hat, double radius, const numvec& v, const indvec& support);

/// Maximizes p^T v over { p in simplex : lower <= p <= upper }: starts from
/// the lower caps and pours the remaining mass into states in decreasing v
/// (ties by lower index) up to the upper caps. Throws Infeasible when the
/// caps exclude the simplex.
numvec box_inner_max(const numvec& lower, const numvec& upper, const numvec& v);

}  // namespace tucrl
