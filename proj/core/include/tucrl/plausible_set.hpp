#pragma once

#include "tucrl/mdp.hpp"
#include "tucrl/types.hpp"

namespace tucrl {

/// Transition uncertainty variants. `bernstein_per_element` is the plain
/// per-element confidence set; `truncated` forbids transitions into the
/// unvisited part for well-explored pairs; `l1_relaxed` replaces the
/// per-element box by an l1 ball (with the same truncation rule);
/// `zeta_relaxed` keeps the per-element form and widens the upper caps on
/// communicating entries of truncated pairs instead.
enum class SetVariant { bernstein_per_element, truncated, l1_relaxed, zeta_relaxed };

const char* set_variant_name(SetVariant v);
SetVariant set_variant_from_name(const std::string& name);

/// Per-pair transition uncertainty. Observed entries carry their empirical
/// frequency and per-element bound; every never-observed entry shares
/// `beta_base`. For l1 variants the ball radius is the sum of all
/// per-element bounds.
struct PlausibleRow {
    indvec observed;     // ascending
    numvec p_hat;
    numvec beta;
    double beta_base = 0.0;
    double radius = 0.0;
    double zeta = 0.0;   // upper-cap widening on communicating entries (zeta variant)
    bool masked = false; // support restricted to the communicating set
    bool unvisited = false;  // no committed visits: l1 center degenerates to uniform
};

/// A set of plausible MDPs: a clipped reward interval per pair plus one
/// transition set per pair, with the episode's communicating-set estimate
/// and the state set the planner should iterate on.
struct PlausibleSet {
    SetVariant variant = SetVariant::bernstein_per_element;
    int num_states = 0;
    indvec actions_per_state;
    indvec pair_offset;
    double r_max = 1.0;
    numvec r_lo, r_hi;
    std::vector<PlausibleRow> rows;
    indvec comm;                 // S^C_k, ascending
    std::vector<char> in_comm;
    indvec plan_states;          // S^EVI: comm when no pair admits new states, else all

    int pair_index(int s, int a) const { return pair_offset[std::size_t(s)] + a; }
    int num_actions(int s) const { return actions_per_state[std::size_t(s)]; }
    bool is_box_variant() const { return variant != SetVariant::l1_relaxed; }
    bool allows(int s, int a, int next) const {
        return !rows[std::size_t(pair_index(s, a))].masked || in_comm[std::size_t(next)];
    }

    // Dense materializations (small instances, tests, oracles).
    numvec lower_caps(int s, int a) const;
    numvec upper_caps(int s, int a) const;
    numvec center(int s, int a) const;
    double l1_radius(int s, int a) const { return rows[std::size_t(pair_index(s, a))].radius; }

    /// Membership of a concrete MDP: rewards inside the intervals and the
    /// transition rows inside the per-pair sets.
    bool contains(const Mdp& truth, double tol = 1e-12) const;
};

}  // namespace tucrl
