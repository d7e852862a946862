#include "tucrl/planner.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tucrl/inner_max.hpp"

namespace tucrl {

namespace {

// States sorted by (v descending, index ascending).
indvec value_order(const numvec& v, const indvec& states) {
    indvec order = states;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (v[std::size_t(a)] != v[std::size_t(b)]) return v[std::size_t(a)] > v[std::size_t(b)];
        return a < b;
    });
    return order;
}

bool row_allows(const PlausibleSet& set, const PlausibleRow& row, int u) {
    return !row.masked || set.in_comm[std::size_t(u)];
}

// max_p p^T v over the per-element box of one pair (lower caps first, then a
// greedy fill along `order`). Returns -inf when forced mass sits on -inf
// entries of v.
double row_value_box(const PlausibleSet& set, const PlausibleRow& row, const numvec& v,
                     const indvec& order) {
    const double widen = set.variant == SetVariant::zeta_relaxed && row.masked ? row.zeta : 0.0;
    double val = 0.0, lo_sum = 0.0;
    for (std::size_t j = 0; j < row.observed.size(); ++j) {
        const int u = row.observed[j];
        if (!row_allows(set, row, u)) continue;
        const double lo = std::max(0.0, row.p_hat[j] - row.beta[j]);
        if (lo > 0.0) {
            if (std::isinf(v[std::size_t(u)])) return -kInf;
            val += lo * v[std::size_t(u)];
            lo_sum += lo;
        }
    }
    double resid = 1.0 - lo_sum;
    if (resid < -1e-12) throw Infeasible("plausible set: lower caps exceed 1");
    if (resid < 0.0) resid = 0.0;

    for (int u : order) {
        if (resid <= 1e-15) break;
        if (!row_allows(set, row, u)) continue;
        double lo = 0.0, hi = std::min(1.0, row.beta_base + widen);
        const auto it = std::lower_bound(row.observed.begin(), row.observed.end(), u);
        if (it != row.observed.end() && *it == u) {
            const auto j = std::size_t(it - row.observed.begin());
            lo = std::max(0.0, row.p_hat[j] - row.beta[j]);
            hi = std::min(1.0, row.p_hat[j] + row.beta[j] + widen);
        }
        const double take = std::min(hi - lo, resid);
        if (take > 0.0) {
            if (std::isinf(v[std::size_t(u)])) return -kInf;
            val += take * v[std::size_t(u)];
            resid -= take;
        }
    }
    if (resid > 1e-9) throw Infeasible("plausible set: upper caps below 1");
    return val;
}

// max_p p^T v over the l1 ball of one pair; mirrors otp() with the shared
// global order.
double row_value_l1(const PlausibleSet& set, int s, int a, const PlausibleRow& row,
                    const numvec& v, const indvec& order) {
    int top = -1;
    for (int u : order) {
        if (row_allows(set, row, u)) {
            top = u;
            break;
        }
    }
    if (top < 0) throw Infeasible("plausible set: empty allowed support");

    if (row.unvisited) {
        const double m = row.masked ? double(set.comm.size()) : double(set.num_states);
        const double c_top = 1.0 / m;
        if (row.radius / 2.0 >= 1.0 - c_top - 1e-15)
            return std::isinf(v[std::size_t(top)]) ? -kInf : v[std::size_t(top)];
        // Rare slow path (heavily shrunk bounds): materialize the optimizer.
        const numvec p = inner_argmax(set, s, a, v);
        double val = 0.0;
        for (int u = 0; u < set.num_states; ++u) {
            if (p[std::size_t(u)] <= 0.0) continue;
            if (std::isinf(v[std::size_t(u)])) return -kInf;
            val += p[std::size_t(u)] * v[std::size_t(u)];
        }
        return val;
    }

    double c_top = 0.0;
    {
        const auto it = std::lower_bound(row.observed.begin(), row.observed.end(), top);
        if (it != row.observed.end() && *it == top)
            c_top = row.p_hat[std::size_t(it - row.observed.begin())];
    }
    const double delta1 = std::min(row.radius / 2.0, 1.0 - c_top);

    // Observed entries ordered worst-first (v ascending, index descending).
    indvec by_rank(row.observed.size());
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::sort(by_rank.begin(), by_rank.end(), [&](int i, int j) {
        const int ui = row.observed[std::size_t(i)], uj = row.observed[std::size_t(j)];
        if (v[std::size_t(ui)] != v[std::size_t(uj)]) return v[std::size_t(ui)] < v[std::size_t(uj)];
        return ui > uj;
    });

    numvec cut(row.observed.size(), 0.0);
    double need = delta1;
    for (int idx : by_rank) {
        if (need <= 1e-15) break;
        const int u = row.observed[std::size_t(idx)];
        if (u == top) continue;
        if (row.masked && !set.in_comm[std::size_t(u)])
            throw Infeasible("plausible set: center mass outside the allowed support");
        const double c = std::min(row.p_hat[std::size_t(idx)], need);
        cut[std::size_t(idx)] = c;
        need -= c;
    }

    double val = 0.0;
    bool top_observed = false;
    for (std::size_t j = 0; j < row.observed.size(); ++j) {
        const int u = row.observed[j];
        double mass = row.p_hat[j] - cut[j];
        if (u == top) {
            mass += delta1;
            top_observed = true;
        }
        if (mass <= 0.0) continue;
        if (std::isinf(v[std::size_t(u)])) return -kInf;
        val += mass * v[std::size_t(u)];
    }
    if (!top_observed && delta1 > 0.0) {
        if (std::isinf(v[std::size_t(top)])) return -kInf;
        val += delta1 * v[std::size_t(top)];
    }
    return val;
}

double row_value(const PlausibleSet& set, int s, int a, const numvec& v, const indvec& order) {
    const PlausibleRow& row = set.rows[std::size_t(set.pair_index(s, a))];
    if (set.variant == SetVariant::l1_relaxed) return row_value_l1(set, s, a, row, v, order);
    return row_value_box(set, row, v, order);
}

// One optimistic backup over `states` into v_next/greedy; returns the
// extreme differences v_next - v over `states`. `tau` < 1 applies the
// aperiodicity mix.
void sweep(const PlausibleSet& set, const numvec& v, const indvec& states, double tau,
           numvec& v_next, indvec& greedy, double& maxd, double& mind) {
    const indvec order = value_order(v, states);
    maxd = -kInf;
    mind = kInf;
    for (int s : states) {
        double best = -kInf;
        int best_a = 0;
        for (int a = 0; a < set.num_actions(s); ++a) {
            const double q =
                set.r_hi[std::size_t(set.pair_index(s, a))] + row_value(set, s, a, v, order);
            if (q > best) {
                best = q;
                best_a = a;
            }
        }
        const double mixed = tau < 1.0 ? (1.0 - tau) * v[std::size_t(s)] + tau * best : best;
        v_next[std::size_t(s)] = mixed;
        greedy[std::size_t(s)] = best_a;
        const double d = mixed - v[std::size_t(s)];
        if (d > maxd) maxd = d;
        if (d < mind) mind = d;
    }
}

void check_plan_consistency(const PlausibleSet& set, const indvec& states) {
    if (states.empty()) throw std::invalid_argument("planner: empty state set");
    if (int(states.size()) == set.num_states) return;
    for (int s : states)
        for (int a = 0; a < set.num_actions(s); ++a)
            if (!set.rows[std::size_t(set.pair_index(s, a))].masked)
                throw std::invalid_argument(
                    "planner: restricted state set requires every planned pair to be masked");
}

}  // namespace

BellmanResult bellman_apply(const numvec& v, const PlausibleSet& set, const indvec& states) {
    if (int(v.size()) != set.num_states) throw std::invalid_argument("bellman_apply: bad v size");
    check_plan_consistency(set, states);
    BellmanResult out;
    out.values = v;
    out.greedy.assign(std::size_t(set.num_states), 0);
    double maxd, mind;
    sweep(set, v, states, 1.0, out.values, out.greedy, maxd, mind);
    return out;
}

numvec inner_argmax(const PlausibleSet& set, int s, int a, const numvec& v) {
    const PlausibleRow& row = set.rows[std::size_t(set.pair_index(s, a))];
    if (set.variant == SetVariant::l1_relaxed) {
        numvec center = set.center(s, a);
        indvec support;
        for (int u = 0; u < set.num_states; ++u)
            if (row_allows(set, row, u)) support.push_back(u);
        return otp(center, row.radius, v, support);
    }
    return box_inner_max(set.lower_caps(s, a), set.upper_caps(s, a), v);
}

PlanResult tevi(const numvec& v0, const PlausibleSet& set, const indvec& states, double eps,
                const TeviOptions& opt) {
    if (!(eps > 0.0)) throw std::invalid_argument("tevi: eps must be positive");
    check_plan_consistency(set, states);
    const int n = set.num_states;
    numvec v = v0.empty() ? numvec(std::size_t(n), 0.0) : v0;
    if (int(v.size()) != n) throw std::invalid_argument("tevi: bad v0 size");

    numvec v_next = v;
    indvec greedy(std::size_t(n), 0);
    double tau = 1.0;
    long iters = 0;
    const int ref = states.front();

    while (true) {
        double maxd, mind;
        sweep(set, v, states, tau, v_next, greedy, maxd, mind);
        ++iters;
        if (maxd - mind <= eps * tau) {
            PlanResult out;
            out.gain = 0.5 * (maxd + mind) / tau;
            out.h = v;
            out.policy = greedy;
            out.n_iters = iters;
            out.converged = true;
            out.used_aperiodicity_mix = tau < 1.0;
            return out;
        }
        if (iters >= opt.max_iters)
            throw MaxIterationsExceeded("tevi: span stopping not met within the iteration cap");
        if (tau == 1.0 && iters >= opt.plain_iters_before_mix) {
            tau = opt.mix;
            v = v0.empty() ? numvec(std::size_t(n), 0.0) : v0;
            continue;
        }
        const double shift = v_next[std::size_t(ref)];
        for (int s : states) v[std::size_t(s)] = v_next[std::size_t(s)] - shift;
    }
}

numvec extended_shortest_path(const PlausibleSet& set, int target) {
    const int n = set.num_states;
    if (target < 0 || target >= n || !set.in_comm[std::size_t(target)])
        throw std::invalid_argument(
            "extended_shortest_path: target must lie in the communicating estimate");

    // Positive optimistic reachability: which states can receive mass.
    std::vector<char> reach(std::size_t(n), 0);
    reach[std::size_t(target)] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (reach[std::size_t(s)]) continue;
            bool hits = false;
            for (int a = 0; a < set.num_actions(s) && !hits; ++a) {
                const PlausibleRow& row = set.rows[std::size_t(set.pair_index(s, a))];
                const bool spread = set.is_box_variant() ? true : row.radius > 0.0;
                if (spread) {
                    for (int u = 0; u < n && !hits; ++u)
                        if (reach[std::size_t(u)] && row_allows(set, row, u)) hits = true;
                } else {
                    for (std::size_t j = 0; j < row.observed.size() && !hits; ++j)
                        if (row.p_hat[j] > 0.0 && reach[std::size_t(row.observed[j])]) hits = true;
                }
            }
            if (hits) {
                reach[std::size_t(s)] = 1;
                changed = true;
            }
        }
    }

    numvec tau(std::size_t(n), kInf);
    tau[std::size_t(target)] = 0.0;
    indvec eval;
    for (int s = 0; s < n; ++s)
        if (reach[std::size_t(s)] && s != target) {
            eval.push_back(s);
            tau[std::size_t(s)] = 0.0;
        }
    if (eval.empty()) return tau;

    auto all = indvec(std::size_t(n));
    std::iota(all.begin(), all.end(), 0);
    numvec negv(std::size_t(n), 0.0);

    const long cap = 200'000;
    for (long it = 1; it <= cap; ++it) {
        for (int s = 0; s < n; ++s)
            negv[std::size_t(s)] = std::isinf(tau[std::size_t(s)]) ? -kInf : -tau[std::size_t(s)];
        const indvec order = value_order(negv, all);

        double change = 0.0;
        for (int s : eval) {
            double best = -kInf;
            for (int a = 0; a < set.num_actions(s); ++a)
                best = std::max(best, row_value(set, s, a, negv, order));
            const double fresh = std::isinf(best) ? kInf : 1.0 - best;
            const double old = tau[std::size_t(s)];
            double d;
            if (std::isinf(fresh) && std::isinf(old))
                d = 0.0;
            else if (std::isinf(fresh) || std::isinf(old))
                d = kInf;
            else
                d = std::abs(fresh - old);
            change = std::max(change, d);
            tau[std::size_t(s)] = fresh;
        }

        // Periodically try to close the gap exactly: evaluate the greedy
        // extended policy by a linear solve and accept it when it is a
        // Bellman fixed point.
        if (change < 1e-9 || it % 50 == 0) {
            for (int s = 0; s < n; ++s)
                negv[std::size_t(s)] =
                    std::isinf(tau[std::size_t(s)]) ? -kInf : -tau[std::size_t(s)];
            const indvec order = value_order(negv, all);

            indvec finite;
            for (int s : eval)
                if (!std::isinf(tau[std::size_t(s)])) finite.push_back(s);
            if (finite.empty()) return tau;
            indvec local(std::size_t(n), -1);
            for (int i = 0; i < int(finite.size()); ++i)
                local[std::size_t(finite[std::size_t(i)])] = i;

            const int m = int(finite.size());
            Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m);
            bool ok = true;
            for (int i = 0; i < m && ok; ++i) {
                const int s = finite[std::size_t(i)];
                double best = -kInf;
                int best_a = 0;
                for (int a = 0; a < set.num_actions(s); ++a) {
                    const double q = row_value(set, s, a, negv, order);
                    if (q > best) {
                        best = q;
                        best_a = a;
                    }
                }
                const numvec p = inner_argmax(set, s, best_a, negv);
                for (int u = 0; u < n && ok; ++u) {
                    if (p[std::size_t(u)] <= 1e-15 || u == target) continue;
                    if (local[std::size_t(u)] < 0)
                        ok = false;  // greedy mass on a diverging state
                    else
                        M(i, local[std::size_t(u)]) -= p[std::size_t(u)];
                }
            }
            if (ok) {
                Eigen::VectorXd x = M.partialPivLu().solve(Eigen::VectorXd::Ones(m));
                numvec cand = tau;
                bool sane = x.allFinite();
                for (int i = 0; i < m && sane; ++i) {
                    if (x(i) < -1e-9) sane = false;
                    cand[std::size_t(finite[std::size_t(i)])] = x(i);
                }
                if (sane) {
                    // Verify the candidate is a fixed point of the full
                    // optimistic Bellman update.
                    numvec negc(std::size_t(n), 0.0);
                    for (int s = 0; s < n; ++s)
                        negc[std::size_t(s)] =
                            std::isinf(cand[std::size_t(s)]) ? -kInf : -cand[std::size_t(s)];
                    const indvec order_c = value_order(negc, all);
                    double resid = 0.0;
                    for (int s : finite) {
                        double best = -kInf;
                        for (int a = 0; a < set.num_actions(s); ++a)
                            best = std::max(best, row_value(set, s, a, negc, order_c));
                        const double fresh = std::isinf(best) ? kInf : 1.0 - best;
                        const double scale = std::max(1.0, std::abs(cand[std::size_t(s)]));
                        if (std::isinf(fresh)) {
                            resid = kInf;
                            break;
                        }
                        resid = std::max(resid, std::abs(fresh - cand[std::size_t(s)]) / scale);
                    }
                    if (resid <= 1e-10) return cand;
                }
            }
        }
    }
    throw MaxIterationsExceeded("extended_shortest_path: did not converge");
}

}  // namespace tucrl
