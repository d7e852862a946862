#include "tucrl/plausible_set.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tucrl {

const char* set_variant_name(SetVariant v) {
    switch (v) {
        case SetVariant::bernstein_per_element: return "bernstein_per_element";
        case SetVariant::truncated: return "truncated";
        case SetVariant::l1_relaxed: return "l1_relaxed";
        case SetVariant::zeta_relaxed: return "zeta_relaxed";
    }
    return "bernstein_per_element";
}

SetVariant set_variant_from_name(const std::string& name) {
    if (name == "bernstein_per_element") return SetVariant::bernstein_per_element;
    if (name == "truncated") return SetVariant::truncated;
    if (name == "l1_relaxed") return SetVariant::l1_relaxed;
    if (name == "zeta_relaxed") return SetVariant::zeta_relaxed;
    throw std::invalid_argument("unknown plausible-set variant: " + name);
}

numvec PlausibleSet::lower_caps(int s, int a) const {
    const PlausibleRow& row = rows[std::size_t(pair_index(s, a))];
    numvec lo(std::size_t(num_states), 0.0);
    for (std::size_t j = 0; j < row.observed.size(); ++j) {
        const int u = row.observed[j];
        if (row.masked && !in_comm[std::size_t(u)]) continue;
        lo[std::size_t(u)] = std::max(0.0, row.p_hat[j] - row.beta[j]);
    }
    return lo;
}

numvec PlausibleSet::upper_caps(int s, int a) const {
    const PlausibleRow& row = rows[std::size_t(pair_index(s, a))];
    const double widen = variant == SetVariant::zeta_relaxed && row.masked ? row.zeta : 0.0;
    numvec hi(std::size_t(num_states), 0.0);
    for (int u = 0; u < num_states; ++u) {
        if (row.masked && !in_comm[std::size_t(u)]) continue;
        hi[std::size_t(u)] = std::min(1.0, row.beta_base + widen);
    }
    for (std::size_t j = 0; j < row.observed.size(); ++j) {
        const int u = row.observed[j];
        if (row.masked && !in_comm[std::size_t(u)]) continue;
        hi[std::size_t(u)] = std::min(1.0, row.p_hat[j] + row.beta[j] + widen);
    }
    return hi;
}

numvec PlausibleSet::center(int s, int a) const {
    const PlausibleRow& row = rows[std::size_t(pair_index(s, a))];
    numvec c(std::size_t(num_states), 0.0);
    if (row.unvisited) {
        // Never-visited pair: the empirical row is all-zero, so the l1 ball
        // is anchored at the uniform distribution over the allowed support.
        const indvec& states = row.masked ? comm : indvec{};
        if (row.masked) {
            for (int u : comm) c[std::size_t(u)] = 1.0 / double(comm.size());
        } else {
            for (int u = 0; u < num_states; ++u) c[std::size_t(u)] = 1.0 / double(num_states);
        }
        (void)states;
        return c;
    }
    for (std::size_t j = 0; j < row.observed.size(); ++j)
        c[std::size_t(row.observed[j])] = row.p_hat[j];
    return c;
}

bool PlausibleSet::contains(const Mdp& truth, double tol) const {
    if (truth.num_states() != num_states) return false;
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions(s); ++a) {
            const auto i = std::size_t(pair_index(s, a));
            const double r = truth.reward_mean(s, a);
            if (r < r_lo[i] - tol || r > r_hi[i] + tol) return false;

            const PlausibleRow& row = rows[i];
            const numvec& p = truth.transition_row(s, a);
            if (variant == SetVariant::l1_relaxed) {
                const numvec c = center(s, a);
                double dist = 0.0;
                for (int u = 0; u < num_states; ++u) dist += std::abs(p[std::size_t(u)] - c[std::size_t(u)]);
                if (dist > row.radius + tol) return false;
                if (row.masked)
                    for (int u = 0; u < num_states; ++u)
                        if (!in_comm[std::size_t(u)] && p[std::size_t(u)] > tol) return false;
                continue;
            }
            // Box variants: check observed entries and the true support; all
            // other entries are zero in both the row and the truth.
            const double widen = variant == SetVariant::zeta_relaxed && row.masked ? row.zeta : 0.0;
            auto check_entry = [&](int u) {
                double lo = 0.0, hi = std::min(1.0, row.beta_base + widen);
                const auto it = std::lower_bound(row.observed.begin(), row.observed.end(), u);
                if (it != row.observed.end() && *it == u) {
                    const auto j = std::size_t(it - row.observed.begin());
                    lo = std::max(0.0, row.p_hat[j] - row.beta[j]);
                    hi = std::min(1.0, row.p_hat[j] + row.beta[j] + widen);
                }
                if (row.masked && !in_comm[std::size_t(u)]) {
                    lo = 0.0;
                    hi = 0.0;
                }
                return p[std::size_t(u)] >= lo - tol && p[std::size_t(u)] <= hi + tol;
            };
            for (int u : row.observed)
                if (!check_entry(u)) return false;
            for (int u : truth.support(s, a))
                if (!check_entry(u)) return false;
        }
    }
    return true;
}

}  // namespace tucrl
