#include "tucrl/inner_max.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tucrl {

namespace {

// States ordered by (v descending, index ascending).
void sort_by_value(indvec& states, const numvec& v) {
    std::sort(states.begin(), states.end(), [&](int a, int b) {
        if (v[std::size_t(a)] != v[std::size_t(b)]) return v[std::size_t(a)] > v[std::size_t(b)];
        return a < b;
    });
}

}  // namespace

numvec otp(const numvec& p_hat, double radius, const numvec& v, const indvec& support) {
    if (p_hat.size() != v.size()) throw std::invalid_argument("otp: size mismatch");
    if (radius < 0.0) throw std::invalid_argument("otp: negative radius");
    if (support.empty()) throw std::invalid_argument("otp: empty support");
    double mass = 0.0;
    for (int s : support) mass += p_hat[std::size_t(s)];
    if (std::abs(mass - 1.0) > 1e-9)
        throw std::invalid_argument("otp: p_hat does not sum to 1 on the support");

    indvec order = support;
    sort_by_value(order, v);

    numvec out(p_hat.size(), 0.0);
    for (int s : support) out[std::size_t(s)] = p_hat[std::size_t(s)];

    const int top = order.front();
    const double raised = std::min(1.0, out[std::size_t(top)] + radius / 2.0);
    double excess = raised - out[std::size_t(top)];
    out[std::size_t(top)] = raised;

    for (std::size_t j = order.size(); j-- > 1 && excess > 1e-15;) {
        const int s = order[j];
        const double cut = std::min(out[std::size_t(s)], excess);
        out[std::size_t(s)] -= cut;
        excess -= cut;
    }
    return out;
}

numvec box_inner_max(const numvec& lower, const numvec& upper, const numvec& v) {
    const std::size_t n = lower.size();
    if (upper.size() != n || v.size() != n)
        throw std::invalid_argument("box_inner_max: size mismatch");

    double lo_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (lower[i] > upper[i] + 1e-15)
            throw Infeasible("box_inner_max: lower cap exceeds upper cap");
        lo_sum += lower[i];
    }
    if (lo_sum > 1.0 + 1e-12) throw Infeasible("box_inner_max: lower caps exceed 1");

    numvec out = lower;
    double resid = 1.0 - lo_sum;
    if (resid < 0.0) resid = 0.0;

    indvec order(n);
    std::iota(order.begin(), order.end(), 0);
    sort_by_value(order, v);
    for (int s : order) {
        if (resid <= 1e-15) break;
        const double room = upper[std::size_t(s)] - out[std::size_t(s)];
        const double take = std::min(room, resid);
        if (take > 0.0) {
            out[std::size_t(s)] += take;
            resid -= take;
        }
    }
    if (resid > 1e-9) throw Infeasible("box_inner_max: upper caps below 1");
    return out;
}

}  // namespace tucrl
