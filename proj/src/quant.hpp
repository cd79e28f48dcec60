#pragma once

#include <cstdint>
#include <vector>

#include "matrix.hpp"

namespace abft::quant {

// Affine 8-bit quantization: x ~= scale * q + bias.
template <typename T>
struct QuantizedMatrix {
    Mat<T> data;
    double scale = 1.0;
    double bias = 0.0;

    std::size_t rows() const { return data.rows(); }
    std::size_t cols() const { return data.cols(); }
};

using QuantU8 = QuantizedMatrix<std::uint8_t>;  // activations
using QuantI8 = QuantizedMatrix<std::int8_t>;   // weights

struct RequantParams {
    double scaleA = 1.0;
    double biasA = 0.0;
    double scaleB = 1.0;
    double biasB = 0.0;
    double scaleC = 1.0;
    double biasC = 0.0;
    std::size_t k = 1;
};

// 32-bit product before requantization; the last column may hold
// row checksums that the output path must skip.
struct IntermediateMatrix {
    MatI32 data;
    bool hasChecksumColumn = false;

    std::size_t rows() const { return data.rows(); }
    std::size_t logicalCols() const {
        return hasChecksumColumn ? data.cols() - 1 : data.cols();
    }
};

QuantU8 quantize_affine_u8(const MatF64& values);
QuantI8 quantize_affine_i8(const MatF64& values);

template <typename T>
MatF64 dequantize(const QuantizedMatrix<T>& q) {
    MatF64 out(q.rows(), q.cols());
    for (std::size_t i = 0; i < q.rows(); ++i)
        for (std::size_t j = 0; j < q.cols(); ++j)
            out(i, j) = q.scale * static_cast<double>(q.data(i, j)) + q.bias;
    return out;
}

// Full expansion of the quantized product, rank-1 terms included.
// Test oracle for the requantization path.
MatF64 reference_quantized_product(const QuantU8& a, const QuantI8& b);

// Maps the 32-bit intermediate back to unsigned 8-bit output.
// rowSumA[i] = sum_k A[i][k], colSumB[j] = sum_k B[k][j] over the
// original n columns; a trailing checksum column in c is ignored.
QuantU8 requantize(const IntermediateMatrix& c,
                   const std::vector<std::int32_t>& rowSumA,
                   const std::vector<std::int32_t>& colSumB,
                   const RequantParams& p);

std::vector<std::int32_t> row_sums(const MatU8& a);
std::vector<std::int32_t> col_sums(const MatI8& b);

}  // namespace abft::quant
