#pragma once

#include <cstdint>
#include <vector>

#include "quant.hpp"

namespace abft::gemm {

inline constexpr std::int32_t kChecksumMod = 127;

// Least non-negative residue; the one modulo convention used everywhere.
inline std::int32_t mod127(std::int64_t v) {
    std::int64_t r = v % kChecksumMod;
    return static_cast<std::int32_t>(r < 0 ? r + kChecksumMod : r);
}

// Per-row sums of B reduced mod 127, each in [0, 126].
struct WeightChecksum {
    std::vector<std::int8_t> values;
};

WeightChecksum compute_row_checksums(const quant::QuantI8& b);

struct BlockLayout {
    std::size_t rowBlock = 64;
    std::size_t colBlock = 16;
};

// B with the checksum column appended, stored block-major so the kernel
// streams contiguous blocks. Immutable once built; shared across calls.
class PackedEncodedWeight {
public:
    PackedEncodedWeight(const quant::QuantI8& b, const WeightChecksum& cs,
                        BlockLayout layout = {});

    std::size_t k() const { return k_; }
    std::size_t n() const { return n_; }  // original columns, checksum excluded
    const BlockLayout& layout() const { return layout_; }
    double scale() const { return scale_; }
    double bias() const { return bias_; }

    // Element of the logical k x (n+1) encoded matrix.
    std::int8_t at(std::size_t i, std::size_t j) const;

    const std::vector<std::int8_t>& buffer() const { return buffer_; }
    std::size_t rowBlocks() const { return rowBlocks_; }
    std::size_t colBlocks() const { return colBlocks_; }

private:
    std::size_t k_ = 0;
    std::size_t n_ = 0;
    BlockLayout layout_;
    std::size_t rowBlocks_ = 0;
    std::size_t colBlocks_ = 0;
    double scale_ = 1.0;
    double bias_ = 0.0;
    std::vector<std::int8_t> buffer_;
};

struct AbftGemmResult {
    quant::IntermediateMatrix cTemp;  // m x (n+1), checksum column last
    std::size_t errCount = 0;
};

// Row-checksum verified product. The result is returned even when rows
// are flagged; recompute-or-alert policy is the caller's.
AbftGemmResult abft_gemm(const quant::QuantU8& a, const PackedEncodedWeight& pb);

// Baseline kernel over the same packed layout without a checksum column.
quant::IntermediateMatrix plain_gemm(const quant::QuantU8& a, const quant::QuantI8& b,
                                     BlockLayout layout = {});

std::size_t verify_checksums(const quant::IntermediateMatrix& c);

}  // namespace abft::gemm
