#pragma once

// Test-only oracle: full dual-encoded ABFT product (column-sum row on A,
// row-sum column on B) with exact checksums and no modulus. Used to
// cross-check the production row-checksum path on small shapes.

#include <cstdint>
#include <vector>

#include "quant.hpp"

namespace abft::testing {

using DualMat = Mat<std::int64_t>;

struct DualCheckResult {
    enum class Kind { clean, located, multi_error } kind;
    std::size_t i = 0;
    std::size_t j = 0;
};

// C' = A' * B' of shape (m+1) x (n+1), checksum row/column included.
inline DualMat dual_encoded_product(const quant::QuantU8& a, const quant::QuantI8& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("dual_encoded_product: dimension mismatch");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();

    DualMat ap(m + 1, k, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            ap(i, p) = a.data(i, p);
            ap(m, p) += a.data(i, p);
        }
    DualMat bp(k, n + 1, 0);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t j = 0; j < n; ++j) {
            bp(p, j) = b.data(p, j);
            bp(p, n) += b.data(p, j);
        }

    DualMat c(m + 1, n + 1, 0);
    for (std::size_t i = 0; i <= m; ++i)
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t j = 0; j <= n; ++j) c(i, j) += ap(i, p) * bp(p, j);
    return c;
}

// Evaluates the row and column checksum equalities on a computed C'.
// Exactly one failing row together with exactly one failing column
// locates the corrupted cell.
inline DualCheckResult dual_encoded_check(const DualMat& c) {
    const std::size_t m = c.rows() - 1, n = c.cols() - 1;
    std::vector<std::size_t> badRows, badCols;
    for (std::size_t i = 0; i <= m; ++i) {
        std::int64_t sum = 0;
        for (std::size_t j = 0; j < n; ++j) sum += c(i, j);
        if (sum != c(i, n)) badRows.push_back(i);
    }
    for (std::size_t j = 0; j <= n; ++j) {
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < m; ++i) sum += c(i, j);
        if (sum != c(m, j)) badCols.push_back(j);
    }
    if (badRows.empty() && badCols.empty()) return {DualCheckResult::Kind::clean};
    if (badRows.size() == 1 && badCols.size() == 1)
        return {DualCheckResult::Kind::located, badRows.front(), badCols.front()};
    return {DualCheckResult::Kind::multi_error};
}

inline DualCheckResult reference_dual_encoded_check(const quant::QuantU8& a,
                                                    const quant::QuantI8& b) {
    return dual_encoded_check(dual_encoded_product(a, b));
}

}  // namespace abft::testing
