#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

namespace tucrl {

using numvec = std::vector<double>;
using indvec = std::vector<int>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown by policy evaluation when two or more recurrent classes of the
/// induced chain are reachable from the start state.
struct NonUnichainPolicy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an iterative solver hits its sweep cap before meeting the
/// span stopping criterion.
struct MaxIterationsExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a constrained inner maximization has an empty feasible set.
struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double span(const numvec& v) {
    if (v.empty()) return 0.0;
    double lo = v.front(), hi = v.front();
    for (double x : v) {
        if (x < lo) lo = x;
        if (x > hi) hi = x;
    }
    return hi - lo;
}

/// Span of v restricted to the given states.
inline double span_over(const numvec& v, const indvec& states) {
    if (states.empty()) return 0.0;
    double lo = v[states.front()], hi = lo;
    for (int s : states) {
        if (v[s] < lo) lo = v[s];
        if (v[s] > hi) hi = v[s];
    }
    return hi - lo;
}

}  // namespace tucrl
