#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tucrl/agent.hpp"
#include "tucrl/envs.hpp"

namespace tucrl {

/// Multi-seed experiment description, parseable from a flat key=value file
/// (see docs/config.md for the schema).
struct ExperimentConfig {
    EnvSpec env;
    std::vector<AgentConfig> agents;          // one entry per algorithm to run
    long horizon = 100'000;
    int n_seeds = 1;
    std::uint64_t base_seed = 1;
    int checkpoints = 200;
    int workers = 1;
    std::string out_dir = "results";

    static ExperimentConfig parse(std::istream& in);
    static ExperimentConfig load(const std::string& path);
};

struct AgentAggregate {
    std::string agent;
    std::vector<long> checkpoints;
    numvec mean;        // mean regret per checkpoint
    numvec ci_half;     // 1.96 * stderr per checkpoint
    numvec final_regret;  // per seed
    long max_z = 0;
    long max_m = 0;
    long violations = 0;
};

struct AggregateResult {
    std::vector<AgentAggregate> agents;
    std::vector<std::string> failures;  // lemma violations, each naming the run
    double geom_min = 0.0;              // min over the grid of (1-x)^(1/x)
    bool all_pass() const { return failures.empty(); }
};

/// Runs every (agent, seed) pair, writes per-run logs plus
/// regret_<agent>.csv, diagnostics_<agent>.csv and lemmas.txt under the
/// output directory, and returns the aggregate. Deterministic in the base
/// seed and independent of the worker count.
AggregateResult run_experiment(const ExperimentConfig& config);

struct LemmaReport {
    std::vector<std::string> violations;
    int runs_checked = 0;
    double geom_min = 0.0;
    bool pass() const { return violations.empty() && runs_checked > 0; }
};

/// Re-checks the three lemma inequalities for every run logged under
/// `logs_dir` by replaying the step traces, and evaluates the geometric
/// bound (1-x)^(1/x) >= 1/3 on a grid.
LemmaReport verify_lemmas(const std::string& logs_dir);

/// Minimum of (1-x)^(1/x) over a geometric grid spanning [1e-6, 0.1].
double geom_bound_min();

/// Geometrically spaced checkpoints in [1, horizon], deduplicated, ending
/// at the horizon.
std::vector<long> geometric_checkpoints(long horizon, int count);

}  // namespace tucrl
