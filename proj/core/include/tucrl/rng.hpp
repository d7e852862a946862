#pragma once

#include <cassert>
#include <cstdint>
#include <random>

#include "tucrl/types.hpp"

namespace tucrl {

/// Deterministic random stream with platform-independent output.
///
/// std::mt19937_64 has a pinned algorithm, but the standard distribution
/// adaptors do not, so the helpers here generate uniforms and categorical
/// draws directly from the raw 64-bit stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform01() { return double(bits() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    int below(int n) {
        assert(n > 0);
        const std::uint64_t un = std::uint64_t(n);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % un;
        std::uint64_t x = bits();
        while (x >= limit) x = bits();
        return int(x % un);
    }

    /// Samples from a probability vector by CDF scan. Assumes the entries
    /// sum to one up to rounding; the last positive entry absorbs the
    /// residual mass.
    int categorical(const numvec& probs) {
        double u = uniform01();
        double acc = 0.0;
        int last_positive = -1;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0.0) continue;
            last_positive = int(i);
            acc += probs[i];
            if (u < acc) return int(i);
        }
        return last_positive;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace tucrl
