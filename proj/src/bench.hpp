#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fault_lab.hpp"

namespace abft::bench {

struct BenchResult {
    std::string label;
    double baselineNanos = 0.0;  // median over repetitions
    double abftNanos = 0.0;
    double overheadFraction = 0.0;  // may be negative
    std::size_t repetitions = 0;
};

inline constexpr std::size_t kMinRepetitions = 5;

// Baseline packed GEMM vs the checksum-carrying path on identical inputs.
// Single threaded; 2 warm-up runs before timing.
BenchResult bench_gemm(const lab::GemmShape& shape, std::size_t repetitions,
                       std::uint64_t seed);

// Unchecked vs checked pooled lookups; a large scratch buffer is touched
// between repetitions to keep the table out of cache.
BenchResult bench_eb(std::size_t tableRows, std::size_t dim, std::size_t pooling,
                     std::size_t batch, std::size_t repetitions, std::uint64_t seed);

std::vector<lab::GemmShape> load_shapes(const std::string& path);

std::string bench_to_csv(const std::vector<BenchResult>& results);

}  // namespace abft::bench
