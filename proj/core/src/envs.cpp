#include "tucrl/envs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tucrl/rng.hpp"

namespace tucrl {

namespace {

void check_unit_interval(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

constexpr double kUniformRange = 0.2;  // reward noise range 1/5

RewardNoise uniform_noise_or_exact(double mean, double r_max) {
    // A zero mean cannot carry a centered uniform interval inside [0, r_max].
    if (mean - kUniformRange / 2 < 0.0 || mean + kUniformRange / 2 > r_max)
        return RewardNoise{NoiseKind::deterministic, 0.0};
    return RewardNoise{NoiseKind::uniform, kUniformRange};
}

}  // namespace

Mdp make_three_state(double delta) {
    check_unit_interval(delta, "delta");
    Mdp mdp(3, {1, 1, 2}, 1.0, 0);
    mdp.set_reward(0, 0, 0.0, uniform_noise_or_exact(0.0, 1.0));
    mdp.set_reward(1, 0, 1.0 / 3.0, uniform_noise_or_exact(1.0 / 3.0, 1.0));
    mdp.set_reward(2, 0, 2.0 / 3.0, uniform_noise_or_exact(2.0 / 3.0, 1.0));
    mdp.set_reward(2, 1, 2.0 / 3.0, uniform_noise_or_exact(2.0 / 3.0, 1.0));
    mdp.set_transition(0, 0, {0.0, delta, 1.0 - delta});
    mdp.set_transition(1, 0, {1.0, 0.0, 0.0});
    mdp.set_transition(2, 0, {1.0 - delta, delta, 0.0});
    mdp.set_transition(2, 1, {0.0, 0.0, 1.0});
    mdp.validate();
    return mdp;
}

Mdp make_two_state_family(double eps) {
    check_unit_interval(eps, "epsilon");
    // states: x = 0, y = 1; actions: b = 0, d = 1
    Mdp mdp(2, {2, 2}, 1.0, 0);
    mdp.set_reward(0, 0, 0.0);
    mdp.set_reward(0, 1, 0.5);
    mdp.set_transition(0, 0, {1.0 - eps, eps});
    mdp.set_transition(0, 1, {1.0, 0.0});
    if (eps > 0.0) {
        mdp.set_reward(1, 0, 1.0);  // b: self-loop paying 1
        mdp.set_reward(1, 1, 0.0);  // d: back to x
        mdp.set_transition(1, 0, {0.0, 1.0});
        mdp.set_transition(1, 1, {1.0, 0.0});
    } else {
        mdp.set_reward(1, 0, 0.0);  // both actions return to x
        mdp.set_reward(1, 1, 1.0);
        mdp.set_transition(1, 0, {1.0, 0.0});
        mdp.set_transition(1, 1, {1.0, 0.0});
    }
    mdp.validate();
    return mdp;
}

Mdp make_bias_toy(double theta) {
    check_unit_interval(theta, "theta");
    Mdp mdp(2, {1, 1}, 1.0, 0);
    mdp.set_reward(0, 0, 0.0);
    mdp.set_reward(1, 0, 1.0);
    mdp.set_transition(0, 0, {1.0 - theta, theta});
    mdp.set_transition(1, 0, {theta, 1.0 - theta});
    mdp.validate();
    return mdp;
}

namespace {

// Classic 5x5 taxi map. Landmarks R, G, Y, B; vertical walls block east/west
// moves between the listed cell pairs.
struct TaxiMap {
    static constexpr int kSize = 5;
    static constexpr int kLandmarks = 4;
    // (row, col) per landmark: R, G, Y, B
    static constexpr std::array<std::array<int, 2>, 4> locs{{{0, 0}, {0, 4}, {4, 0}, {4, 3}}};
    // walls between (row, col) and (row, col + 1)
    static constexpr std::array<std::array<int, 2>, 6> walls{
        {{0, 1}, {1, 1}, {3, 0}, {3, 2}, {4, 0}, {4, 2}}};

    static bool blocked(int row, int col, int dcol) {
        const int left = dcol > 0 ? col : col - 1;
        for (const auto& w : walls)
            if (w[0] == row && w[1] == left) return true;
        return false;
    }

    static int landmark_at(int row, int col) {
        for (int i = 0; i < kLandmarks; ++i)
            if (locs[std::size_t(i)][0] == row && locs[std::size_t(i)][1] == col) return i;
        return -1;
    }
};

// state = ((row * 5 + col) * 5 + passenger) * 4 + destination,
// passenger in {0..3 at landmark, 4 in taxi}
int taxi_encode(int row, int col, int pass, int dest) {
    return ((row * 5 + col) * 5 + pass) * 4 + dest;
}

constexpr double kTaxiStep = (-1.0 + 10.0) / 30.0;
constexpr double kTaxiIllegal = (-10.0 + 10.0) / 30.0;
constexpr double kTaxiDropoff = (20.0 + 10.0) / 30.0;

}  // namespace

Mdp make_taxi(bool misspecified) {
    const int full = 5 * 5 * 5 * 4;
    const int n_actions = 6;

    // Start: taxi at the center cell, passenger at R, destination G.
    const int start_full = taxi_encode(2, 2, 0, 1);

    indvec keep(std::size_t(full), -1);
    int n_states = 0;
    for (int s = 0; s < full; ++s) {
        const int dest = s % 4;
        const int pass = (s / 4) % 5;
        if (!misspecified && pass < 4 && pass == dest) continue;
        keep[std::size_t(s)] = n_states++;
    }

    Mdp mdp(n_states, indvec(std::size_t(n_states), n_actions), 1.0,
            keep[std::size_t(start_full)]);

    for (int row = 0; row < 5; ++row) {
        for (int col = 0; col < 5; ++col) {
            for (int pass = 0; pass < 5; ++pass) {
                for (int dest = 0; dest < 4; ++dest) {
                    const int s_full = taxi_encode(row, col, pass, dest);
                    const int s = keep[std::size_t(s_full)];
                    if (s < 0) continue;
                    for (int a = 0; a < n_actions; ++a) {
                        numvec row_probs(std::size_t(n_states), 0.0);
                        double reward = kTaxiStep;
                        if (a < 4) {
                            // 0 south, 1 north, 2 east, 3 west
                            int nr = row, nc = col;
                            if (a == 0 && row < 4) nr = row + 1;
                            if (a == 1 && row > 0) nr = row - 1;
                            if (a == 2 && col < 4 && !TaxiMap::blocked(row, col, +1)) nc = col + 1;
                            if (a == 3 && col > 0 && !TaxiMap::blocked(row, col, -1)) nc = col - 1;
                            row_probs[std::size_t(keep[std::size_t(
                                taxi_encode(nr, nc, pass, dest))])] = 1.0;
                        } else if (a == 4) {
                            // pickup
                            const int here = TaxiMap::landmark_at(row, col);
                            if (pass < 4 && here == pass) {
                                row_probs[std::size_t(keep[std::size_t(
                                    taxi_encode(row, col, 4, dest))])] = 1.0;
                            } else {
                                reward = kTaxiIllegal;
                                row_probs[std::size_t(s)] = 1.0;
                            }
                        } else {
                            // dropoff
                            const int here = TaxiMap::landmark_at(row, col);
                            if (pass == 4 && here == dest) {
                                reward = kTaxiDropoff;
                                // respawn: fresh passenger/destination pair
                                for (int np = 0; np < 4; ++np)
                                    for (int nd = 0; nd < 4; ++nd) {
                                        if (np == nd) continue;
                                        row_probs[std::size_t(keep[std::size_t(
                                            taxi_encode(row, col, np, nd))])] = 1.0 / 12.0;
                                    }
                            } else if (pass == 4 && here >= 0) {
                                reward = kTaxiIllegal;
                                row_probs[std::size_t(keep[std::size_t(
                                    taxi_encode(row, col, here, dest))])] = 1.0;
                            } else {
                                reward = kTaxiIllegal;
                                row_probs[std::size_t(s)] = 1.0;
                            }
                        }
                        mdp.set_reward(s, a, reward);
                        mdp.set_transition(s, a, std::move(row_probs));
                    }
                }
            }
        }
    }
    mdp.validate();
    return mdp;
}

Mdp make_random_weakly_communicating(int num_states, int num_actions, int n_transient,
                                     std::uint64_t seed, double connectivity) {
    if (num_states < 1 || num_actions < 1)
        throw std::invalid_argument("random mdp: need at least one state and action");
    if (n_transient < 0 || n_transient >= num_states)
        throw std::invalid_argument("random mdp: n_transient must be < num_states");
    if (!(connectivity > 0.0 && connectivity <= 1.0))
        throw std::invalid_argument("random mdp: connectivity must lie in (0, 1]");

    const int core = num_states - n_transient;
    Rng rng(seed);
    Mdp mdp(num_states, indvec(std::size_t(num_states), num_actions), 1.0, 0);

    // Random cycle through the core guarantees a strongly connected support.
    auto cycle = indvec(std::size_t(core));
    std::iota(cycle.begin(), cycle.end(), 0);
    for (int i = core - 1; i > 0; --i) std::swap(cycle[std::size_t(i)], cycle[std::size_t(rng.below(i + 1))]);

    for (int s = 0; s < num_states; ++s) {
        const bool in_core = s < core;
        int cycle_next = -1;
        int cycle_action = -1;
        if (in_core && core > 1) {
            int pos = int(std::find(cycle.begin(), cycle.end(), s) - cycle.begin());
            cycle_next = cycle[std::size_t((pos + 1) % core)];
            cycle_action = rng.below(num_actions);
        }
        for (int a = 0; a < num_actions; ++a) {
            numvec weights(std::size_t(num_states), 0.0);
            // Core rows stay in the core; transient rows may point anywhere.
            const int allowed = in_core ? core : num_states;
            for (int next = 0; next < allowed; ++next)
                if (rng.uniform01() < connectivity) weights[std::size_t(next)] = 0.1 + 0.9 * rng.uniform01();
            if (in_core && a == cycle_action && cycle_next >= 0)
                weights[std::size_t(cycle_next)] = std::max(weights[std::size_t(cycle_next)], 0.5);
            double total = std::accumulate(weights.begin(), weights.end(), 0.0);
            if (total == 0.0) {
                const int next = in_core ? (cycle_next >= 0 ? cycle_next : s) : rng.below(allowed);
                weights[std::size_t(next)] = 1.0;
                total = 1.0;
            }
            for (double& w : weights) w /= total;
            mdp.set_transition(s, a, std::move(weights));
            mdp.set_reward(s, a, rng.uniform01());
        }
    }
    mdp.validate();
    return mdp;
}

EnvSpec EnvSpec::parse(const std::string& text) {
    EnvSpec spec;
    std::string kind = text;
    std::string params;
    if (auto colon = text.find(':'); colon != std::string::npos) {
        kind = text.substr(0, colon);
        params = text.substr(colon + 1);
    }
    if (kind == "three_state")
        spec.kind = EnvKind::three_state;
    else if (kind == "two_state" || kind == "two_state_family")
        spec.kind = EnvKind::two_state;
    else if (kind == "bias_toy")
        spec.kind = EnvKind::bias_toy;
    else if (kind == "taxi")
        spec.kind = EnvKind::taxi;
    else if (kind == "random")
        spec.kind = EnvKind::random;
    else
        throw std::invalid_argument("unknown environment kind: " + kind);

    std::istringstream in(params);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("environment parameter needs key=value: " + item);
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        if (key == "delta")
            spec.delta = std::stod(val);
        else if (key == "epsilon")
            spec.epsilon = std::stod(val);
        else if (key == "theta")
            spec.theta = std::stod(val);
        else if (key == "misspecified")
            spec.misspecified = (val == "true" || val == "1");
        else if (key == "S")
            spec.num_states = std::stoi(val);
        else if (key == "A")
            spec.num_actions = std::stoi(val);
        else if (key == "transient")
            spec.n_transient = std::stoi(val);
        else if (key == "seed")
            spec.seed = std::stoull(val);
        else if (key == "connectivity")
            spec.connectivity = std::stod(val);
        else
            throw std::invalid_argument("unknown environment parameter: " + key);
    }
    return spec;
}

std::string EnvSpec::name() const {
    char buf[128];
    switch (kind) {
        case EnvKind::three_state:
            std::snprintf(buf, sizeof(buf), "three_state:delta=%.12g", delta);
            break;
        case EnvKind::two_state:
            std::snprintf(buf, sizeof(buf), "two_state:epsilon=%.12g", epsilon);
            break;
        case EnvKind::bias_toy:
            std::snprintf(buf, sizeof(buf), "bias_toy:theta=%.12g", theta);
            break;
        case EnvKind::taxi:
            std::snprintf(buf, sizeof(buf), "taxi:misspecified=%s", misspecified ? "true" : "false");
            break;
        case EnvKind::random:
            std::snprintf(buf, sizeof(buf), "random:S=%d,A=%d,transient=%d,seed=%llu,connectivity=%.12g",
                          num_states, num_actions, n_transient,
                          static_cast<unsigned long long>(seed), connectivity);
            break;
    }
    return buf;
}

Mdp EnvSpec::build() const {
    switch (kind) {
        case EnvKind::three_state: return make_three_state(delta);
        case EnvKind::two_state: return make_two_state_family(epsilon);
        case EnvKind::bias_toy: return make_bias_toy(theta);
        case EnvKind::taxi: return make_taxi(misspecified);
        case EnvKind::random:
            return make_random_weakly_communicating(num_states, num_actions, n_transient, seed,
                                                    connectivity);
    }
    throw std::logic_error("EnvSpec::build: bad kind");
}

}  // namespace tucrl
