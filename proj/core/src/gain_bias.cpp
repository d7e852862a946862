#include "tucrl/gain_bias.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "tucrl/decompose.hpp"

namespace tucrl {

namespace {

// Strongly connected components of the policy-induced support graph,
// iterative Tarjan. Returns component id per state; ids are in reverse
// topological order (a component only reaches components with smaller id).
indvec scc_components(const std::vector<indvec>& adj, int& n_comps) {
    const int n = int(adj.size());
    indvec index(std::size_t(n), -1), low(std::size_t(n), 0), comp(std::size_t(n), -1);
    std::vector<char> on_stack(std::size_t(n), 0);
    indvec stack;
    int next_index = 0;
    n_comps = 0;

    struct Frame {
        int v;
        std::size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[std::size_t(root)] != -1) continue;
        std::vector<Frame> call;
        call.push_back({root, 0});
        index[std::size_t(root)] = low[std::size_t(root)] = next_index++;
        stack.push_back(root);
        on_stack[std::size_t(root)] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            const indvec& out = adj[std::size_t(f.v)];
            if (f.child < out.size()) {
                int w = out[f.child++];
                if (index[std::size_t(w)] == -1) {
                    index[std::size_t(w)] = low[std::size_t(w)] = next_index++;
                    stack.push_back(w);
                    on_stack[std::size_t(w)] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[std::size_t(w)]) {
                    low[std::size_t(f.v)] = std::min(low[std::size_t(f.v)], index[std::size_t(w)]);
                }
            } else {
                if (low[std::size_t(f.v)] == index[std::size_t(f.v)]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[std::size_t(w)] = 0;
                        comp[std::size_t(w)] = n_comps;
                        if (w == f.v) break;
                    }
                    ++n_comps;
                }
                int v = f.v;
                call.pop_back();
                if (!call.empty())
                    low[std::size_t(call.back().v)] =
                        std::min(low[std::size_t(call.back().v)], low[std::size_t(v)]);
            }
        }
    }
    return comp;
}

}  // namespace

GainBias policy_gain_bias(const Mdp& mdp, const indvec& policy) {
    const int n = mdp.num_states();
    if (int(policy.size()) != n)
        throw std::invalid_argument("policy_gain_bias: policy must cover every state");
    for (int s = 0; s < n; ++s)
        if (policy[std::size_t(s)] < 0 || policy[std::size_t(s)] >= mdp.num_actions(s))
            throw std::invalid_argument("policy_gain_bias: action out of range");

    auto adj = std::vector<indvec>(std::size_t(n));
    for (int s = 0; s < n; ++s) adj[std::size_t(s)] = mdp.support(s, policy[std::size_t(s)]);

    int n_comps = 0;
    indvec comp = scc_components(adj, n_comps);

    // A component is recurrent iff no edge leaves it.
    std::vector<char> comp_recurrent(std::size_t(n_comps), 1);
    for (int s = 0; s < n; ++s)
        for (int next : adj[std::size_t(s)])
            if (comp[std::size_t(next)] != comp[std::size_t(s)])
                comp_recurrent[std::size_t(comp[std::size_t(s)])] = 0;

    // Count recurrent classes reachable from the start state.
    std::vector<char> reach(std::size_t(n), 0);
    {
        std::queue<int> q;
        q.push(mdp.start_state());
        reach[std::size_t(mdp.start_state())] = 1;
        while (!q.empty()) {
            int s = q.front();
            q.pop();
            for (int next : adj[std::size_t(s)])
                if (!reach[std::size_t(next)]) {
                    reach[std::size_t(next)] = 1;
                    q.push(next);
                }
        }
    }
    std::vector<char> comp_reached(std::size_t(n_comps), 0);
    for (int s = 0; s < n; ++s)
        if (reach[std::size_t(s)]) comp_reached[std::size_t(comp[std::size_t(s)])] = 1;
    int reachable_recurrent = 0;
    for (int c = 0; c < n_comps; ++c)
        if (comp_recurrent[std::size_t(c)] && comp_reached[std::size_t(c)]) ++reachable_recurrent;
    if (reachable_recurrent >= 2)
        throw NonUnichainPolicy("policy induces multiple recurrent classes reachable from s1");

    numvec gain(std::size_t(n), 0.0), bias(std::size_t(n), 0.0);
    std::vector<char> is_recurrent_state(std::size_t(n), 0);

    // Per-class stationary distribution, gain, and Cesaro bias (pi' h = 0).
    for (int c = 0; c < n_comps; ++c) {
        if (!comp_recurrent[std::size_t(c)]) continue;
        indvec members;
        for (int s = 0; s < n; ++s)
            if (comp[std::size_t(s)] == c) members.push_back(s);
        const int m = int(members.size());
        indvec local(std::size_t(n), -1);
        for (int i = 0; i < m; ++i) local[std::size_t(members[std::size_t(i)])] = i;

        Eigen::MatrixXd P(m, m);
        Eigen::VectorXd r(m);
        for (int i = 0; i < m; ++i) {
            const int s = members[std::size_t(i)];
            const int a = policy[std::size_t(s)];
            const numvec& row = mdp.transition_row(s, a);
            for (int j = 0; j < m; ++j) P(i, j) = row[std::size_t(members[std::size_t(j)])];
            r(i) = mdp.reward_mean(s, a);
        }

        // stationary: pi' (I - P) = 0, sum pi = 1
        Eigen::MatrixXd A(m + 1, m);
        A.topRows(m) = (Eigen::MatrixXd::Identity(m, m) - P).transpose();
        A.row(m).setOnes();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
        b(m) = 1.0;
        Eigen::VectorXd pi = A.colPivHouseholderQr().solve(b);

        const double g = pi.dot(r);

        // bias: (I - P) h = r - g, pi' h = 0
        Eigen::MatrixXd B(m + 1, m);
        B.topRows(m) = Eigen::MatrixXd::Identity(m, m) - P;
        B.row(m) = pi.transpose();
        Eigen::VectorXd rhs(m + 1);
        rhs.head(m) = r.array() - g;
        rhs(m) = 0.0;
        Eigen::VectorXd h = B.colPivHouseholderQr().solve(rhs);

        for (int i = 0; i < m; ++i) {
            const int s = members[std::size_t(i)];
            gain[std::size_t(s)] = g;
            bias[std::size_t(s)] = h(i);
            is_recurrent_state[std::size_t(s)] = 1;
        }
    }

    // Transient part: g = P g and g + h = r + P h restricted to transients.
    indvec trans;
    for (int s = 0; s < n; ++s)
        if (!is_recurrent_state[std::size_t(s)]) trans.push_back(s);
    if (!trans.empty()) {
        const int m = int(trans.size());
        indvec local(std::size_t(n), -1);
        for (int i = 0; i < m; ++i) local[std::size_t(trans[std::size_t(i)])] = i;

        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd g_in = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd h_in = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd r(m);
        for (int i = 0; i < m; ++i) {
            const int s = trans[std::size_t(i)];
            const int a = policy[std::size_t(s)];
            const numvec& row = mdp.transition_row(s, a);
            r(i) = mdp.reward_mean(s, a);
            for (int next : mdp.support(s, a)) {
                const double p = row[std::size_t(next)];
                if (local[std::size_t(next)] >= 0) {
                    T(i, local[std::size_t(next)]) += p;
                } else {
                    g_in(i) += p * gain[std::size_t(next)];
                    h_in(i) += p * bias[std::size_t(next)];
                }
            }
        }
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m) - T;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
        Eigen::VectorXd g_t = lu.solve(g_in);
        Eigen::VectorXd h_t = lu.solve(r - g_t + h_in);
        for (int i = 0; i < m; ++i) {
            gain[std::size_t(trans[std::size_t(i)])] = g_t(i);
            bias[std::size_t(trans[std::size_t(i)])] = h_t(i);
        }
    }

    // Verify the evaluation equations and normalize the bias to min 0.
    for (int s = 0; s < n; ++s) {
        const int a = policy[std::size_t(s)];
        const numvec& row = mdp.transition_row(s, a);
        double ph = 0.0, pg = 0.0;
        for (int next : mdp.support(s, a)) {
            ph += row[std::size_t(next)] * bias[std::size_t(next)];
            pg += row[std::size_t(next)] * gain[std::size_t(next)];
        }
        const double res_g = gain[std::size_t(s)] - pg;
        const double res_h = gain[std::size_t(s)] + bias[std::size_t(s)] - mdp.reward_mean(s, a) - ph;
        if (std::abs(res_g) > 1e-9 || std::abs(res_h) > 1e-9)
            throw std::runtime_error("policy_gain_bias: evaluation residual exceeds 1e-9");
    }
    const double lo = *std::min_element(bias.begin(), bias.end());
    for (double& h : bias) h -= lo;

    GainBias out;
    out.gain = std::move(gain);
    out.bias = std::move(bias);
    out.bias_span = span(out.bias);
    return out;
}

OptimalGainBias optimal_gain_bias(const Mdp& mdp, const RviOptions& opt) {
    const int n = mdp.num_states();
    const double eps = opt.eps > 0 ? opt.eps : 1e-8 * mdp.r_max();

    // Evaluation set: states reachable from s1 when they are mutually
    // reachable, otherwise the communicating part containing s1.
    Decomposition dec = decompose_structure(mdp, mdp.start_state());
    indvec eval_states;
    {
        std::vector<char> fwd(std::size_t(n), 0);
        std::queue<int> q;
        q.push(mdp.start_state());
        fwd[std::size_t(mdp.start_state())] = 1;
        while (!q.empty()) {
            int s = q.front();
            q.pop();
            for (int a = 0; a < mdp.num_actions(s); ++a)
                for (int next : mdp.support(s, a))
                    if (!fwd[std::size_t(next)]) {
                        fwd[std::size_t(next)] = 1;
                        q.push(next);
                    }
        }
        indvec reach;
        for (int s = 0; s < n; ++s)
            if (fwd[std::size_t(s)]) reach.push_back(s);
        eval_states = (reach.size() == dec.comm.size()) ? reach : dec.comm;
    }
    // The set must be closed under transitions for value iteration to be
    // well defined.
    for (int s : eval_states)
        for (int a = 0; a < mdp.num_actions(s); ++a)
            for (int next : mdp.support(s, a))
                if (!dec.in_comm[std::size_t(next)] &&
                    std::find(eval_states.begin(), eval_states.end(), next) == eval_states.end())
                    throw std::invalid_argument(
                        "optimal_gain_bias: evaluation set is not closed; the MDP is not "
                        "weakly communicating from the start state");

    numvec v(std::size_t(n), 0.0), v_next(std::size_t(n), 0.0);
    indvec greedy(std::size_t(n), 0);
    double tau = 1.0;
    long sweeps = 0;
    const int ref = eval_states.front();

    while (true) {
        double maxd = -kInf, mind = kInf;
        for (int s : eval_states) {
            double best = -kInf;
            int best_a = 0;
            for (int a = 0; a < mdp.num_actions(s); ++a) {
                double q = mdp.reward_mean(s, a);
                const numvec& row = mdp.transition_row(s, a);
                for (int next : mdp.support(s, a)) q += row[std::size_t(next)] * v[std::size_t(next)];
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
        ++sweeps;
        if (maxd - mind <= eps * tau) {
            const double g = 0.5 * (maxd + mind) / tau;
            OptimalGainBias out;
            out.policy = greedy;
            out.evaluated = eval_states;
            out.sweeps = sweeps;
            out.gb.gain.assign(std::size_t(n), g);
            out.gb.bias.assign(std::size_t(n), 0.0);
            double lo = kInf;
            for (int s : eval_states) lo = std::min(lo, v[std::size_t(s)]);
            for (int s : eval_states) out.gb.bias[std::size_t(s)] = v[std::size_t(s)] - lo;
            out.gb.bias_span = span_over(out.gb.bias, eval_states);
            return out;
        }
        if (sweeps >= opt.max_sweeps)
            throw MaxIterationsExceeded("optimal_gain_bias: span stopping not met");
        if (tau == 1.0 && sweeps >= opt.plain_sweeps_before_mix) {
            tau = opt.mix;
            std::fill(v.begin(), v.end(), 0.0);
            continue;
        }
        const double shift = v_next[std::size_t(ref)];
        for (int s : eval_states) v[std::size_t(s)] = v_next[std::size_t(s)] - shift;
    }
}

}  // namespace tucrl
