#include "tucrl/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "tucrl/shortest_path.hpp"

namespace tucrl {

namespace {

std::vector<char> reachable_from(const Mdp& mdp, int s1, bool reversed) {
    const int n = mdp.num_states();
    auto adj = std::vector<std::vector<int>>(std::size_t(n));
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < mdp.num_actions(s); ++a)
            for (int next : mdp.support(s, a)) {
                if (reversed)
                    adj[std::size_t(next)].push_back(s);
                else
                    adj[std::size_t(s)].push_back(next);
            }
    std::vector<char> seen(std::size_t(n), 0);
    std::queue<int> q;
    q.push(s1);
    seen[std::size_t(s1)] = 1;
    while (!q.empty()) {
        const int s = q.front();
        q.pop();
        for (int next : adj[std::size_t(s)])
            if (!seen[std::size_t(next)]) {
                seen[std::size_t(next)] = 1;
                q.push(next);
            }
    }
    return seen;
}

}  // namespace

Decomposition decompose_structure(const Mdp& mdp, int s1) {
    const int n = mdp.num_states();
    if (s1 < 0 || s1 >= n) throw std::invalid_argument("decompose: start state out of range");

    const std::vector<char> fwd = reachable_from(mdp, s1, false);
    const std::vector<char> bwd = reachable_from(mdp, s1, true);

    Decomposition out;
    out.in_comm.assign(std::size_t(n), 0);
    for (int s = 0; s < n; ++s) {
        if ((fwd[std::size_t(s)] && bwd[std::size_t(s)]) || s == s1) {
            out.in_comm[std::size_t(s)] = 1;
            out.comm.push_back(s);
        } else {
            out.transient.push_back(s);
        }
    }
    for (int s : out.comm)
        for (int a = 0; a < mdp.num_actions(s); ++a)
            out.max_comm_support = std::max(out.max_comm_support, int(mdp.support(s, a).size()));
    return out;
}

Decomposition decompose(const Mdp& mdp, int s1) {
    Decomposition out = decompose_structure(mdp, s1);

    // D^C: longest shortest path within the communicating part.
    double dc = 0.0;
    if (out.comm.size() > 1) {
        for (int target : out.comm) {
            const numvec tau = shortest_path(mdp, target);
            for (int s : out.comm) {
                if (s == target) continue;
                if (std::isinf(tau[std::size_t(s)])) {
                    dc = kInf;
                } else {
                    dc = std::max(dc, tau[std::size_t(s)]);
                }
                if (std::isinf(dc)) break;
            }
            if (std::isinf(dc)) break;
        }
    }
    out.comm_diameter = dc;

    // Any pair involving a state outside S^C is disconnected in at least
    // one direction, so D is infinite exactly when S^T is nonempty.
    out.diameter = out.transient.empty() ? dc : kInf;
    return out;
}

}  // namespace tucrl
