#pragma once

#include <cstdint>

namespace abft::lab {

// Counter-based splittable generator. Each (seed, stream) pair yields an
// independent sequence, so trials can run in any order on any number of
// workers and still see identical draws.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, bound), bound > 0. Rejection-free modulo is fine at
    // these bound sizes (bias < 2^-32).
    std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

    // Uniform in [lo, hi].
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    double next_double() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double next_real(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace abft::lab
