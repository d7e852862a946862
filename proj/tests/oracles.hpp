#pragma once

// Independent reference computations used by the tests: a small dense
// linear solver, brute-force vertex enumeration for the inner-maximization
// polytopes, and random MDP/statistics generators. None of these share code
// with the library's solvers.

#include <algorithm>
#include <cmath>
#include <vector>

#include "tucrl/counts.hpp"
#include "tucrl/mdp.hpp"
#include "tucrl/rng.hpp"
#include "tucrl/types.hpp"

namespace oracles {

using tucrl::indvec;
using tucrl::numvec;

// Gaussian elimination with partial pivoting; returns false when singular.
inline bool solve_dense(std::vector<numvec> a, numvec b, numvec& x) {
    const int n = int(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[std::size_t(r)][std::size_t(col)]) >
                std::abs(a[std::size_t(pivot)][std::size_t(col)]))
                pivot = r;
        if (std::abs(a[std::size_t(pivot)][std::size_t(col)]) < 1e-12) return false;
        std::swap(a[std::size_t(pivot)], a[std::size_t(col)]);
        std::swap(b[std::size_t(pivot)], b[std::size_t(col)]);
        for (int r = col + 1; r < n; ++r) {
            const double f =
                a[std::size_t(r)][std::size_t(col)] / a[std::size_t(col)][std::size_t(col)];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                a[std::size_t(r)][std::size_t(c)] -= f * a[std::size_t(col)][std::size_t(c)];
            b[std::size_t(r)] -= f * b[std::size_t(col)];
        }
    }
    x.assign(std::size_t(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[std::size_t(r)];
        for (int c = r + 1; c < n; ++c)
            acc -= a[std::size_t(r)][std::size_t(c)] * x[std::size_t(c)];
        x[std::size_t(r)] = acc / a[std::size_t(r)][std::size_t(r)];
    }
    return true;
}

// max p.v over { p in simplex : lower <= p <= upper } by enumerating the
// vertices: all coordinates but one sit at a bound.
inline double box_vertex_max(const numvec& lower, const numvec& upper, const numvec& v) {
    const int m = int(v.size());
    double best = -tucrl::kInf;
    for (int frac = 0; frac < m; ++frac) {
        for (int mask = 0; mask < (1 << m); ++mask) {
            double sum = 0.0, val = 0.0;
            for (int i = 0; i < m; ++i) {
                if (i == frac) continue;
                const double p = (mask >> i) & 1 ? upper[std::size_t(i)] : lower[std::size_t(i)];
                sum += p;
                val += p * v[std::size_t(i)];
            }
            const double pf = 1.0 - sum;
            if (pf < lower[std::size_t(frac)] - 1e-12 || pf > upper[std::size_t(frac)] + 1e-12)
                continue;
            best = std::max(best, val + pf * v[std::size_t(frac)]);
        }
    }
    return best;
}

// max p.v over { p in simplex(I) : |p - phat|_1 <= beta }. Extreme points
// either are simplex corners or raise a single coordinate by beta/2, zero
// out a subset, leave at most one coordinate partially lowered, and keep the
// rest at phat.
inline double l1_vertex_max(const numvec& phat, double beta, const numvec& v,
                            const indvec& support) {
    const int m = int(support.size());
    double best = -tucrl::kInf;
    auto consider = [&](const numvec& p) {
        double sum = 0.0, dist = 0.0, val = 0.0;
        for (int i = 0; i < m; ++i) {
            const int s = support[std::size_t(i)];
            if (p[std::size_t(i)] < -1e-12) return;
            sum += p[std::size_t(i)];
            dist += std::abs(p[std::size_t(i)] - phat[std::size_t(s)]);
            val += p[std::size_t(i)] * v[std::size_t(s)];
        }
        if (std::abs(sum - 1.0) > 1e-9 || dist > beta + 1e-9) return;
        best = std::max(best, val);
    };

    numvec base(std::size_t(m));
    for (int i = 0; i < m; ++i) base[std::size_t(i)] = phat[std::size_t(support[std::size_t(i)])];
    consider(base);
    for (int j = 0; j < m; ++j) {
        numvec corner(std::size_t(m), 0.0);
        corner[std::size_t(j)] = 1.0;
        consider(corner);
    }
    for (int up = 0; up < m; ++up) {
        for (int mask = 0; mask < (1 << m); ++mask) {
            if ((mask >> up) & 1) continue;
            double zeroed = 0.0;
            for (int i = 0; i < m; ++i)
                if ((mask >> i) & 1) zeroed += base[std::size_t(i)];
            // no partial coordinate: total moved mass is exactly `zeroed`
            {
                numvec p = base;
                for (int i = 0; i < m; ++i)
                    if ((mask >> i) & 1) p[std::size_t(i)] = 0.0;
                p[std::size_t(up)] += zeroed;
                consider(p);
            }
            // ball active: moved mass beta/2, one partial coordinate
            for (int part = 0; part < m; ++part) {
                if (part == up || ((mask >> part) & 1)) continue;
                const double t = beta / 2.0;
                const double lowered = t - zeroed;
                if (lowered < -1e-12 || lowered > base[std::size_t(part)] + 1e-12) continue;
                numvec p = base;
                for (int i = 0; i < m; ++i)
                    if ((mask >> i) & 1) p[std::size_t(i)] = 0.0;
                p[std::size_t(part)] -= lowered;
                p[std::size_t(up)] += t;
                consider(p);
            }
        }
    }
    return best;
}

// Dense random communicating MDP (every transition probability positive).
inline tucrl::Mdp random_dense_mdp(int num_states, int num_actions, tucrl::Rng& rng) {
    tucrl::Mdp mdp(num_states, indvec(std::size_t(num_states), num_actions), 1.0, 0);
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
            numvec row(std::size_t(num_states));
            double total = 0.0;
            for (int u = 0; u < num_states; ++u) {
                row[std::size_t(u)] = 0.05 + rng.uniform01();
                total += row[std::size_t(u)];
            }
            for (double& p : row) p /= total;
            mdp.set_transition(s, a, std::move(row));
            mdp.set_reward(s, a, rng.uniform01());
        }
    }
    mdp.validate();
    return mdp;
}

// Statistics gathered from a short random walk on the MDP; every visited
// transition lands inside the walked set, matching what a real run produces.
inline void random_walk_stats(const tucrl::Mdp& mdp, long steps, tucrl::Rng& rng,
                              tucrl::Counts& counts, tucrl::EmpiricalModel& model) {
    int s = mdp.start_state();
    counts.start_episode();
    for (long t = 0; t < steps; ++t) {
        const int a = rng.below(mdp.num_actions(s));
        const double r = mdp.sample_reward(s, a, rng);
        const int next = mdp.sample_next(s, a, rng);
        tucrl::record(counts, model, s, a, r, next);
        s = next;
    }
    counts.end_episode();
    counts.start_episode();  // open a fresh episode so t_k = current t
}

}  // namespace oracles
