#pragma once

#include <cstdint>
#include <string>

#include "tucrl/mdp.hpp"

namespace tucrl {

/// Three-state domain: one action in s0 and s1, two in s2; reward means
/// (0, 1/3, 2/3, 2/3) with uniform noise of range 1/5 on the nonzero means.
/// delta = 0 makes s1 unreachable (S^C = {s0, s2}).
Mdp make_three_state(double delta);

/// Two-state family M_eps over states {x, y} with actions {b, d}. For
/// eps > 0 the optimal gain is 1 (reach y and loop); for eps = 0 both
/// actions at y return to x and the optimal gain is 1/2.
Mdp make_two_state_family(double eps);

/// Two states, one action each: x pays 0 and switches with probability
/// theta, y pays 1 and switches with probability theta. Optimal bias span
/// is 1/(2 theta) for theta > 0.
Mdp make_bias_toy(double theta);

/// 5x5 taxi gridworld with 4 landmarks and 6 actions, made continuing by
/// respawning a fresh (passenger, destination) pair after a successful
/// dropoff. Rewards are mapped affinely into [0, 1] via r' = (r + 10) / 30.
/// With misspecified=true the full 500-state product space is exposed (the
/// 100 states with passenger landmark equal to the destination are never
/// entered); with misspecified=false those states are removed.
Mdp make_taxi(bool misspecified);

/// Seeded random weakly-communicating MDP: a strongly-connected core of
/// S - n_transient states (planted via a random cycle plus extra edges with
/// density `connectivity`) and n_transient states unreachable from s1 = 0.
Mdp make_random_weakly_communicating(int num_states, int num_actions, int n_transient,
                                     std::uint64_t seed, double connectivity = 0.35);

enum class EnvKind { three_state, two_state, bias_toy, taxi, random };

/// Environment selector parseable from harness configs, e.g.
/// "three_state:delta=0.005", "taxi:misspecified=true",
/// "random:S=6,A=2,transient=2,seed=9".
struct EnvSpec {
    EnvKind kind = EnvKind::three_state;
    double delta = 0.0;        // three_state
    double epsilon = 0.0;      // two_state
    double theta = 0.5;        // bias_toy
    bool misspecified = true;  // taxi
    int num_states = 4;        // random
    int num_actions = 2;
    int n_transient = 1;
    std::uint64_t seed = 1;
    double connectivity = 0.35;

    static EnvSpec parse(const std::string& text);
    std::string name() const;
    Mdp build() const;
};

}  // namespace tucrl
