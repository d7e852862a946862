#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tucrl/decompose.hpp"
#include "tucrl/envs.hpp"
#include "tucrl/gain_bias.hpp"

using namespace tucrl;

TEST_CASE("three-state domain wiring") {
    const Mdp mdp = make_three_state(1.0);
    CHECK(mdp.transition(0, 0, 1) == 1.0);  // delta = 1: s0 reaches s1 surely
    CHECK(mdp.reward_mean(0, 0) == 0.0);
    CHECK(mdp.reward_mean(1, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(mdp.reward_mean(2, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(mdp.reward_mean(2, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(mdp.reward_noise(1, 0).kind == NoiseKind::uniform);
    CHECK(mdp.reward_noise(1, 0).param == doctest::Approx(0.2));

    CHECK_THROWS_AS(make_three_state(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(make_three_state(1.1), std::invalid_argument);
}

TEST_CASE("two-state family optimal structure") {
    const OptimalGainBias pos = optimal_gain_bias(make_two_state_family(0.5));
    CHECK(pos.gain() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(pos.policy[0] == 0);  // b at x

    const OptimalGainBias zero = optimal_gain_bias(make_two_state_family(0.0));
    CHECK(zero.gain() == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(zero.policy[0] == 1);  // d at x
}

TEST_CASE("bias toy examples") {
    const GainBias half = policy_gain_bias(make_bias_toy(0.5), {0, 0});
    CHECK(half.bias_span == doctest::Approx(1.0).epsilon(1e-9));
    const GainBias one = policy_gain_bias(make_bias_toy(1.0), {0, 0});
    CHECK(one.gain[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("every constructor output passes the MDP invariants") {
    CHECK_NOTHROW(make_three_state(0.0).validate());
    CHECK_NOTHROW(make_two_state_family(0.3).validate());
    CHECK_NOTHROW(make_bias_toy(0.25).validate());
    CHECK_NOTHROW(make_taxi(true).validate());
    CHECK_NOTHROW(make_taxi(false).validate());
    // Asm. 1: the start state belongs to the communicating part.
    for (const Mdp& mdp : {make_three_state(0.0), make_two_state_family(0.0), make_taxi(true)}) {
        const Decomposition dec = decompose_structure(mdp, mdp.start_state());
        CHECK(dec.in_comm[std::size_t(mdp.start_state())] == 1);
    }
}

TEST_CASE("taxi structure: 500/400 states, 100 misspecified") {
    const Mdp full = make_taxi(true);
    CHECK(full.num_states() == 500);
    const Decomposition dec = decompose_structure(full, full.start_state());
    CHECK(dec.transient.size() == 100);
    CHECK(dec.comm.size() == 400);

    const Mdp clean = make_taxi(false);
    CHECK(clean.num_states() == 400);
    const Decomposition dec2 = decompose_structure(clean, clean.start_state());
    CHECK(dec2.transient.empty());
}

TEST_CASE("taxi walls block movement and moves off the grid stay put") {
    const Mdp taxi = make_taxi(false);
    // state encoding: ((row*5 + col)*5 + pass)*4 + dest, minus removed states
    auto encode = [&](int row, int col, int pass, int dest) {
        int idx = 0;
        for (int s = 0; s < 500; ++s) {
            const int d = s % 4;
            const int p = (s / 4) % 5;
            if (p < 4 && p == d) continue;
            if (s == ((row * 5 + col) * 5 + pass) * 4 + dest) return idx;
            ++idx;
        }
        return -1;
    };
    // wall between (0,1) and (0,2): moving east from (0,1) stays
    const int s = encode(0, 1, 0, 1);
    CHECK(taxi.transition(s, 2, s) == 1.0);
    // moving north off the grid stays
    const int top = encode(0, 3, 0, 1);
    CHECK(taxi.transition(top, 1, top) == 1.0);
    // open cell: east from (2,1) moves to (2,2)
    const int mid = encode(2, 1, 0, 1);
    CHECK(taxi.transition(mid, 2, encode(2, 2, 0, 1)) == 1.0);
}

TEST_CASE("taxi dropoff respawns uniformly over the 12 valid pairs") {
    const Mdp taxi = make_taxi(true);
    int found = 0;
    for (int s = 0; s < taxi.num_states(); ++s) {
        const int dest = s % 4;
        const int pass = (s / 4) % 5;
        const int cell = s / 20;
        const std::array<int, 4> landmark_cell = {0 * 5 + 0, 0 * 5 + 4, 4 * 5 + 0, 4 * 5 + 3};
        if (pass == 4 && cell == landmark_cell[std::size_t(dest)]) {
            ++found;
            CHECK(taxi.support(s, 5).size() == 12);
            for (int next : taxi.support(s, 5))
                CHECK(taxi.transition(s, 5, next) == doctest::Approx(1.0 / 12.0));
            CHECK(taxi.reward_mean(s, 5) == doctest::Approx(1.0));
        }
    }
    CHECK(found == 4);  // one in-taxi state per destination landmark
}

TEST_CASE("random generator determinism and feasibility checks") {
    CHECK_THROWS_AS(make_random_weakly_communicating(3, 2, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_random_weakly_communicating(0, 2, 0, 1), std::invalid_argument);
    const Mdp a = make_random_weakly_communicating(6, 2, 2, 5);
    const Mdp b = make_random_weakly_communicating(6, 2, 2, 5);
    CHECK(a.to_string() == b.to_string());
    const Mdp tiny = make_random_weakly_communicating(2, 1, 0, 123);
    CHECK(decompose_structure(tiny, 0).transient.empty());
}

TEST_CASE("env spec round-trips through its name") {
    for (const char* text : {"three_state:delta=0.005", "two_state:epsilon=0.1",
                             "bias_toy:theta=0.25", "taxi:misspecified=true",
                             "random:S=6,A=2,transient=2,seed=9,connectivity=0.4"}) {
        const EnvSpec spec = EnvSpec::parse(text);
        const EnvSpec back = EnvSpec::parse(spec.name());
        CHECK(back.name() == spec.name());
        CHECK_NOTHROW(back.build().validate());
    }
    CHECK_THROWS_AS(EnvSpec::parse("unknown:x=1"), std::invalid_argument);
}
