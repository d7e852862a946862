#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "tucrl/confidence.hpp"
#include "tucrl/decompose.hpp"
#include "tucrl/planner.hpp"

namespace tucrl {

enum class Algorithm { ucrl, tucrl };

const char* algorithm_name(Algorithm algo);
Algorithm algorithm_from_name(const std::string& name);

struct AgentConfig {
    Algorithm algorithm = Algorithm::tucrl;
    double delta = 0.05;
    /// Transition-set variant used while the transient estimate is nonempty.
    SetVariant tucrl_variant = SetVariant::l1_relaxed;
    double shrink_r = 1.0;
    double shrink_p = 1.0;
    double eps_scale = 1.0;  // planner accuracy eps_k = eps_scale * r_max / sqrt(t_k)
    std::uint64_t seed = 0;
    /// Record optimism/span diagnostics against the true model.
    bool instrument = true;
    long planner_max_iters = 1'000'000;
};

struct StepRecord {
    long t;
    int k;
    int s;
    int a;
    double r;
    int next;
    bool under_explored;  // N±(s,a) <= sqrt(t / (S A)) at execution time
};

enum class StopReason { doubling, new_state, horizon };
const char* stop_reason_name(StopReason reason);

struct EpisodeRecord {
    int k = 0;
    long t_k = 1;
    int start_state = 0;
    int n_comm = 0;         // |S^C_k|
    int n_under = 0;        // |K_k|
    bool plan_full = false; // planned over the full state space
    double g_tilde = 0.0;
    double eps_k = 0.0;
    long steps = 0;
    double delta_k = 0.0;   // sum_sa nu_k(s,a) (g* - r(s,a))
    StopReason reason = StopReason::horizon;
    double span_h_comm = 0.0;          // sp over S^C_k of the planner's h
    bool in_untruncated = false;       // true model inside the per-element set
    bool sufficiently_explored = false;  // t_k >= C(k) with the true D^C
    bool planner_mixed = false;
};

/// Once-per-environment analysis shared across seeded runs.
struct EnvAnalysis {
    Decomposition decomp;
    double g_star = 0.0;
};
EnvAnalysis analyze_env(const Mdp& env);

struct RunLog {
    std::string agent;
    std::string env_name;
    std::uint64_t seed = 0;
    double delta = 0.05;
    long horizon = 0;
    int num_states = 0;
    int max_actions = 0;
    int n_comm_true = 0;
    double comm_diameter = 0.0;
    double g_star = 0.0;
    double r_max = 1.0;
    std::vector<StepRecord> steps;
    std::vector<EpisodeRecord> episodes;

    void write_steps_csv(std::ostream& out) const;    // t,k,s,a,r,s_next
    void write_episodes_csv(std::ostream& out) const; // k,t_k,SCk,Kk,g_tilde,delta_k,reason
};

/// Runs one seeded learning loop for `horizon` steps. `analysis` may carry
/// a precomputed decomposition and optimal gain (shared across seeds);
/// when null and instrumentation is on, it is computed internally.
RunLog run_agent(const Mdp& env, const AgentConfig& cfg, long horizon,
                 const EnvAnalysis* analysis = nullptr);

inline RunLog run_ucrl(const Mdp& env, AgentConfig cfg, long horizon,
                       const EnvAnalysis* analysis = nullptr) {
    cfg.algorithm = Algorithm::ucrl;
    return run_agent(env, cfg, horizon, analysis);
}
inline RunLog run_tucrl(const Mdp& env, AgentConfig cfg, long horizon,
                        const EnvAnalysis* analysis = nullptr) {
    cfg.algorithm = Algorithm::tucrl;
    return run_agent(env, cfg, horizon, analysis);
}

/// Cumulative regret Delta(t) = t g* - sum of realized rewards, t = 1..T.
numvec regret_curve(const RunLog& run, double g_star);

struct Diagnostics {
    long z_t = 0;
    double z_bound = 0.0;
    long episodes = 0;
    double episode_bound = 0.0;
    long stopping_violations = 0;  // nu_k(s,a) > max(1, N_k(s,a)) occurrences
    long optimism_violations = 0;
    long span_violations = 0;
    bool lemmas_pass() const {
        return stopping_violations == 0 && double(z_t) <= z_bound &&
               double(episodes) <= episode_bound;
    }
};

/// Recomputes the lemma quantities from the raw trace (visit counts are
/// replayed, not read from the agent's own accumulators).
Diagnostics diagnostics(const RunLog& run);

/// Exploration threshold C(k) = (2401/9) (D^C)^2 S A (S^T_k ln(2 S A t_k / delta))^2.
double exploration_threshold(double comm_diameter, int num_states, int max_actions,
                             int n_transient, long t_k, double delta);

/// Membership of the true model in the untruncated per-element Bernstein
/// set at the episode opened in `counts`.
bool bernstein_membership(const Mdp& truth, const Counts& counts, const EmpiricalModel& model,
                          double delta, double shrink_r, double shrink_p);

}  // namespace tucrl
