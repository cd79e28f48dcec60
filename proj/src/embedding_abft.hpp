#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace abft::eb {

// 8-bit table with per-row affine parameters and precomputed 32-bit
// row-sum checksums. Immutable after construction.
struct QuantEmbeddingTable {
    MatI8 rows;                           // R x d
    std::vector<float> scales;            // per row
    std::vector<float> biases;            // per row
    std::vector<std::int32_t> rowSums;    // exact integer row sums

    std::size_t numRows() const { return rows.rows(); }
    std::size_t dim() const { return rows.cols(); }
};

struct IndexBag {
    std::vector<std::size_t> indices;
    std::optional<std::vector<float>> weights;  // same length when present
};

struct EbCheckedResult {
    std::vector<float> r;   // pooled vector, production 32-bit accumulation
    double rSum = 0.0;      // 64-bit sums used by the check
    double cSum = 0.0;
    bool err = false;
};

inline constexpr double kEbRelativeBound = 1e-5;

std::vector<std::int32_t> precompute_row_sums(const MatI8& rows);

// Plain pooled lookup, float accumulation throughout.
std::vector<float> embedding_bag(const QuantEmbeddingTable& table, const IndexBag& bag);

// Lookup plus the row-sum equality check at the relative bound.
EbCheckedResult abft_embedding_bag(const QuantEmbeddingTable& table, const IndexBag& bag);

std::vector<EbCheckedResult> batch_abft_eb(const QuantEmbeddingTable& table,
                                           const std::vector<IndexBag>& bags);

// Binary container: "ABEB", version u16, R u64, d u32, R records of
// (d int8, f32 scale, f32 bias), then R i32 row sums. Little-endian.
void save_table(const QuantEmbeddingTable& table, const std::string& path);
QuantEmbeddingTable load_table(const std::string& path, bool validateRowSums = true);

}  // namespace abft::eb
