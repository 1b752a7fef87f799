#pragma once

// Portable seeded random source.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard, as is std::seed_seq. The standard distributions are not (their
// algorithms are implementation-defined), so the conversions below are done
// here: uniform doubles take the top 53 bits of one engine draw, normals use
// the Box-Muller transform on two uniforms, and bounded integers use
// rejection sampling. Same seed, same numbers, on every conforming platform.
//
// Independent streams are derived from (seed, stream id) through seed_seq,
// so e.g. dataset draw k always consumes stream k regardless of generation
// order.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace svq {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}

    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        // 1 - u keeps the log argument in (0, 1].
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace svq
