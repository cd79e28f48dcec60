#include "quant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace abft::quant {

namespace {

double round_half_away(double x) {
    return x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5);
}

template <typename T>
QuantizedMatrix<T> quantize_affine(const MatF64& values, double domainMin, double domainMax) {
    if (values.empty()) throw std::invalid_argument("quantize_affine: empty matrix");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : values.data()) {
        if (!std::isfinite(v)) throw std::invalid_argument("quantize_affine: non-finite entry");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double scale = hi > lo ? (hi - lo) / (domainMax - domainMin) : 1.0;
    double bias = lo - scale * domainMin;

    QuantizedMatrix<T> q;
    q.scale = scale;
    q.bias = bias;
    q.data = Mat<T>(values.rows(), values.cols());
    for (std::size_t i = 0; i < values.rows(); ++i) {
        for (std::size_t j = 0; j < values.cols(); ++j) {
            double r = round_half_away((values(i, j) - bias) / scale);
            r = std::clamp(r, domainMin, domainMax);
            q.data(i, j) = static_cast<T>(r);
        }
    }
    return q;
}

}  // namespace

QuantU8 quantize_affine_u8(const MatF64& values) {
    return quantize_affine<std::uint8_t>(values, 0.0, 255.0);
}

QuantI8 quantize_affine_i8(const MatF64& values) {
    return quantize_affine<std::int8_t>(values, -128.0, 127.0);
}

MatF64 reference_quantized_product(const QuantU8& a, const QuantI8& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("reference_quantized_product: dimension mismatch");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();

    std::vector<std::int32_t> rowSumA = row_sums(a.data);
    std::vector<std::int32_t> colSumB = col_sums(b.data);

    MatF64 out(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::int32_t acc = 0;
            for (std::size_t p = 0; p < k; ++p)
                acc += static_cast<std::int32_t>(a.data(i, p)) *
                       static_cast<std::int32_t>(b.data(p, j));
            out(i, j) = a.scale * b.scale * static_cast<double>(acc) +
                        a.scale * b.bias * static_cast<double>(rowSumA[i]) +
                        b.scale * a.bias * static_cast<double>(colSumB[j]) +
                        static_cast<double>(k) * a.bias * b.bias;
        }
    }
    return out;
}

QuantU8 requantize(const IntermediateMatrix& c,
                   const std::vector<std::int32_t>& rowSumA,
                   const std::vector<std::int32_t>& colSumB,
                   const RequantParams& p) {
    const std::size_t m = c.rows();
    const std::size_t n = c.logicalCols();
    if (rowSumA.size() != m) throw std::invalid_argument("requantize: rowSumA length mismatch");
    if (colSumB.size() != n) throw std::invalid_argument("requantize: colSumB length mismatch");
    if (p.scaleC <= 0.0) throw std::invalid_argument("requantize: scaleC must be positive");

    QuantU8 out;
    out.scale = p.scaleC;
    out.bias = p.biasC;
    out.data = MatU8(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double cf = p.scaleA * p.scaleB * static_cast<double>(c.data(i, j)) +
                        p.scaleA * p.biasB * static_cast<double>(rowSumA[i]) +
                        p.scaleB * p.biasA * static_cast<double>(colSumB[j]) +
                        static_cast<double>(p.k) * p.biasA * p.biasB;
            double r = round_half_away((cf - p.biasC) / p.scaleC);
            out.data(i, j) = static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
        }
    }
    return out;
}

std::vector<std::int32_t> row_sums(const MatU8& a) {
    std::vector<std::int32_t> sums(a.rows(), 0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            sums[i] += static_cast<std::int32_t>(a(i, j));
    return sums;
}

std::vector<std::int32_t> col_sums(const MatI8& b) {
    std::vector<std::int32_t> sums(b.cols(), 0);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            sums[j] += static_cast<std::int32_t>(b(i, j));
    return sums;
}

}  // namespace abft::quant
