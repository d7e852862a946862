#include "tucrl/shortest_path.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace tucrl {

namespace {

// States from which some stationary policy reaches `target` almost surely.
// Iteratively removes states that can only reach the target through actions
// whose support leaks outside the current candidate set.
std::vector<char> almost_sure_set(const Mdp& mdp, int target) {
    const int n = mdp.num_states();
    std::vector<char> in(std::size_t(n), 1);
    while (true) {
        // Backward closure from the target over actions with support inside `in`.
        std::vector<char> keep(std::size_t(n), 0);
        keep[std::size_t(target)] = 1;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int s = 0; s < n; ++s) {
                if (keep[std::size_t(s)] || !in[std::size_t(s)]) continue;
                for (int a = 0; a < mdp.num_actions(s) && !keep[std::size_t(s)]; ++a) {
                    bool inside = true, touches = false;
                    for (int next : mdp.support(s, a)) {
                        if (!in[std::size_t(next)]) {
                            inside = false;
                            break;
                        }
                        if (keep[std::size_t(next)]) touches = true;
                    }
                    if (inside && touches) {
                        keep[std::size_t(s)] = 1;
                        changed = true;
                    }
                }
            }
        }
        if (keep == in) return in;
        in = std::move(keep);
    }
}

// Expected hitting times of a fixed policy on the local index set (target
// excluded): solves (I - Q) tau = 1.
numvec evaluate_policy_hitting(const Mdp& mdp, int target, const indvec& states,
                               const indvec& local, const indvec& policy) {
    const int m = int(states.size());
    if (m == 0) return {};
    if (m <= 64) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m);
        for (int i = 0; i < m; ++i) {
            const int s = states[std::size_t(i)];
            const int a = policy[std::size_t(s)];
            const numvec& row = mdp.transition_row(s, a);
            for (int next : mdp.support(s, a)) {
                if (next == target) continue;
                const int j = local[std::size_t(next)];
                M(i, j) -= row[std::size_t(next)];
            }
        }
        Eigen::VectorXd x = M.partialPivLu().solve(Eigen::VectorXd::Ones(m));
        return numvec(x.data(), x.data() + m);
    }
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < m; ++i) {
        const int s = states[std::size_t(i)];
        const int a = policy[std::size_t(s)];
        const numvec& row = mdp.transition_row(s, a);
        double diag = 1.0;
        for (int next : mdp.support(s, a)) {
            if (next == target) continue;
            const int j = local[std::size_t(next)];
            if (j == i)
                diag -= row[std::size_t(next)];
            else
                trips.emplace_back(i, j, -row[std::size_t(next)]);
        }
        trips.emplace_back(i, i, diag);
    }
    Eigen::SparseMatrix<double> M(m, m);
    M.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(M);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("shortest_path: policy evaluation solve failed");
    Eigen::VectorXd x = lu.solve(Eigen::VectorXd::Ones(m));
    return numvec(x.data(), x.data() + m);
}

// Expected cost of playing `a` in `s` against hitting times `tau`
// (+infinity when the action puts mass on an infinite entry).
double action_cost(const Mdp& mdp, int s, int a, int target, const numvec& tau) {
    double q = 1.0;
    const numvec& row = mdp.transition_row(s, a);
    for (int next : mdp.support(s, a)) {
        if (next == target) continue;
        if (std::isinf(tau[std::size_t(next)])) return kInf;
        q += row[std::size_t(next)] * tau[std::size_t(next)];
    }
    return q;
}

}  // namespace

numvec shortest_path(const Mdp& mdp, int target) {
    const int n = mdp.num_states();
    if (target < 0 || target >= n) throw std::invalid_argument("shortest_path: bad target");

    const std::vector<char> as = almost_sure_set(mdp, target);
    numvec tau(std::size_t(n), kInf);
    tau[std::size_t(target)] = 0.0;

    indvec states;
    for (int s = 0; s < n; ++s)
        if (as[std::size_t(s)] && s != target) states.push_back(s);
    if (states.empty()) return tau;

    indvec local(std::size_t(n), -1);
    for (int i = 0; i < int(states.size()); ++i) local[std::size_t(states[std::size_t(i)])] = i;

    // Initial proper policy: follow the backward BFS layers over actions
    // whose support stays in the almost-sure set.
    indvec policy(std::size_t(n), 0);
    {
        std::vector<char> seen(std::size_t(n), 0);
        seen[std::size_t(target)] = 1;
        std::queue<int> q;
        q.push(target);
        int found = 0;
        while (!q.empty() && found < int(states.size())) {
            const int cur = q.front();
            q.pop();
            for (int s : states) {
                if (seen[std::size_t(s)]) continue;
                for (int a = 0; a < mdp.num_actions(s); ++a) {
                    bool inside = true, hits = false;
                    for (int next : mdp.support(s, a)) {
                        if (!as[std::size_t(next)]) {
                            inside = false;
                            break;
                        }
                        if (next == cur) hits = true;
                    }
                    if (inside && hits) {
                        policy[std::size_t(s)] = a;
                        seen[std::size_t(s)] = 1;
                        q.push(s);
                        ++found;
                        break;
                    }
                }
            }
        }
        if (found < int(states.size()))
            throw std::runtime_error("shortest_path: failed to seed a proper policy");
    }

    // Policy iteration with exact evaluation.
    const long max_rounds = 16L * n * std::max(1, mdp.max_actions()) + 64;
    for (long round = 0; round < max_rounds; ++round) {
        numvec vals = evaluate_policy_hitting(mdp, target, states, local, policy);
        for (std::size_t i = 0; i < states.size(); ++i)
            tau[std::size_t(states[i])] = vals[i];

        bool improved = false;
        for (int s : states) {
            const double cur = action_cost(mdp, s, policy[std::size_t(s)], target, tau);
            double best = cur;
            int best_a = policy[std::size_t(s)];
            for (int a = 0; a < mdp.num_actions(s); ++a) {
                const double q = action_cost(mdp, s, a, target, tau);
                if (q < best - 1e-12 * std::max(1.0, std::abs(best))) {
                    best = q;
                    best_a = a;
                }
            }
            if (best_a != policy[std::size_t(s)]) {
                policy[std::size_t(s)] = best_a;
                improved = true;
            }
        }
        if (!improved) return tau;
    }
    throw MaxIterationsExceeded("shortest_path: policy iteration did not settle");
}

double diameter(const Mdp& mdp) {
    double d = 0.0;
    for (int target = 0; target < mdp.num_states(); ++target) {
        const numvec tau = shortest_path(mdp, target);
        for (int s = 0; s < mdp.num_states(); ++s) {
            if (s == target) continue;
            if (std::isinf(tau[std::size_t(s)])) return kInf;
            d = std::max(d, tau[std::size_t(s)]);
        }
    }
    return d;
}

}  // namespace tucrl
