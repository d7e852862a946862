#pragma once

#include "tucrl/mdp.hpp"
#include "tucrl/types.hpp"

namespace tucrl {

/// Partition of the state space into the communicating part containing the
/// start state and the remaining (transient or unreachable) states, together
/// with the diameters and the maximal transition support of the
/// communicating part.
struct Decomposition {
    indvec comm;                  // S^C, ascending, contains s1
    indvec transient;             // S^T
    std::vector<char> in_comm;
    double diameter = kInf;       // D over the full state set
    double comm_diameter = 0.0;   // D^C over S^C x S^C
    int max_comm_support = 0;     // Gamma^C
};

/// Structure only (no diameters): S^C is the set of states mutually
/// reachable with s1 in the directed support graph, plus s1 itself.
Decomposition decompose_structure(const Mdp& mdp, int s1);

/// Full decomposition including D and D^C.
Decomposition decompose(const Mdp& mdp, int s1);

}  // namespace tucrl
