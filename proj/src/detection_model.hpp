#pragma once

#include <cstdint>

namespace abft::model {

enum class FaultModel { single_bit_flip, random_value };

struct DetectionEstimate {
    double probability = 0.0;
    bool isLowerBound = false;
};

// Probability that a corruption of one element of B is caught by at
// least one of the m row checks.
DetectionEstimate detect_prob_error_in_B(FaultModel model, std::uint64_t m);

DetectionEstimate detect_prob_error_in_C(FaultModel model);

enum class EncodedSide { A, B };

// Predicted ABFT cost as a fraction of the 2mnk GEMM flops.
double encode_overhead(EncodedSide side, std::uint64_t m, std::uint64_t n, std::uint64_t k);

// EmbeddingBag check cost relative to the 3md lookup flops.
double eb_overhead(std::uint64_t m, std::uint64_t d);

// Extra table memory from the 32-bit row sums, p bits per element.
double eb_memory_overhead(std::uint64_t p, std::uint64_t d);

// f(a): number of multiples of mod in (0, a].
std::uint64_t count_multiples(std::uint64_t a, std::uint64_t mod);

struct ExactFraction {
    std::uint64_t undetected = 0;
    std::uint64_t total = 0;

    double value() const { return static_cast<double>(undetected) / static_cast<double>(total); }
};

// Exhaustive enumeration of the per-row undetected probability for a
// corrupted element of B, independent of the closed forms above.
ExactFraction oracle_undetected_fraction_B(FaultModel model);

}  // namespace abft::model
