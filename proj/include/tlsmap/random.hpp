// random.hpp — counter-based random streams keyed by (seed, stream index)

#pragma once

#include <cstdint>

namespace tlsmap {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Draw k of stream s is mix64(key(seed, s) + k * gamma): any draw of any
// stream is a pure function of (seed, s, k), so realizations can be generated
// in any order or on any worker.
class CounterStream {
public:
    static constexpr std::uint64_t gamma = 0x9E3779B97F4A7C15ULL;

    CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_(mix64(mix64(seed ^ 0x6A09E667F3BCC909ULL) + mix64(stream + gamma))) {}

    std::uint64_t next() noexcept { return mix64(key_ + (++counter_) * gamma); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    // Uniform on the open interval (lo, hi).
    double uniform_open(double lo, double hi) noexcept {
        for (;;) {
            const double x = uniform(lo, hi);
            if (x > lo && x < hi) return x;
        }
    }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_{0};
};

} // namespace tlsmap
