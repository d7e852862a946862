#pragma once

#include "tucrl/mdp.hpp"
#include "tucrl/types.hpp"

namespace tucrl {

/// Gain and bias of a stationary deterministic policy (or of the optimal
/// policy). The gain is stored per state and is constant across states for
/// unichain problems; the bias is shifted so its minimum component is zero.
struct GainBias {
    numvec gain;
    numvec bias;
    double bias_span = 0.0;
};

/// Exact policy evaluation by linear solves. Handles multichain induced
/// chains: each recurrent class gets its own gain and (Cesaro-normalized)
/// bias, transient states are bridged through absorption probabilities.
///
/// Throws NonUnichainPolicy when two or more recurrent classes are reachable
/// from the MDP's start state. Residuals of the evaluation equations are
/// kept below 1e-9.
GainBias policy_gain_bias(const Mdp& mdp, const indvec& policy);

struct RviOptions {
    double eps = -1.0;              // span stopping threshold; < 0 => 1e-8 * r_max
    long max_sweeps = 1'000'000;
    long plain_sweeps_before_mix = 10'000;
    double mix = 0.99;              // aperiodicity transform coefficient
};

struct OptimalGainBias {
    GainBias gb;
    indvec policy;
    indvec evaluated;   // states the solver iterated over
    long sweeps = 0;
    double gain() const { return gb.gain.empty() ? 0.0 : gb.gain[std::size_t(evaluated.front())]; }
};

/// Relative value iteration with span stopping. Evaluates on the states
/// reachable from the start state when that set is communicating, otherwise
/// on the communicating part containing the start state. Falls back to an
/// aperiodicity transformation (convex mix with a self-loop) when the span
/// fails to contract within `plain_sweeps_before_mix` sweeps.
OptimalGainBias optimal_gain_bias(const Mdp& mdp, const RviOptions& opt = {});

}  // namespace tucrl
