#include "gemm_abft.hpp"

#include <algorithm>
#include <stdexcept>

namespace abft::gemm {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// Pack a logical k x cols int8 matrix block-major, zero padding partial blocks.
std::vector<std::int8_t> pack_blocks(std::size_t k, std::size_t cols, BlockLayout layout,
                                     const auto& at) {
    const std::size_t rb = ceil_div(k, layout.rowBlock);
    const std::size_t cb = ceil_div(cols, layout.colBlock);
    std::vector<std::int8_t> buf(rb * cb * layout.rowBlock * layout.colBlock, 0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const std::size_t block = (i / layout.rowBlock) * cb + j / layout.colBlock;
            const std::size_t off = block * layout.rowBlock * layout.colBlock +
                                    (i % layout.rowBlock) * layout.colBlock +
                                    j % layout.colBlock;
            buf[off] = at(i, j);
        }
    }
    return buf;
}

// Blocked u8 x s8 -> s32 kernel over a packed buffer. Fixed accumulation
// order per output element, so results are schedule independent.
MatI32 packed_gemm(const MatU8& a, const std::vector<std::int8_t>& buf, std::size_t k,
                   std::size_t cols, BlockLayout layout) {
    const std::size_t m = a.rows();
    const std::size_t cb = ceil_div(cols, layout.colBlock);
    MatI32 c(m, cols, 0);
    for (std::size_t rb0 = 0; rb0 < k; rb0 += layout.rowBlock) {
        const std::size_t rbEnd = std::min(rb0 + layout.rowBlock, k);
        for (std::size_t cb0 = 0; cb0 < cols; cb0 += layout.colBlock) {
            const std::size_t cbEnd = std::min(cb0 + layout.colBlock, cols);
            const std::size_t block = (rb0 / layout.rowBlock) * cb + cb0 / layout.colBlock;
            const std::int8_t* blk = buf.data() + block * layout.rowBlock * layout.colBlock;
            for (std::size_t i = 0; i < m; ++i) {
                std::int32_t* crow = &c(i, 0);
                for (std::size_t p = rb0; p < rbEnd; ++p) {
                    const std::int32_t av = a(i, p);
                    if (av == 0) continue;
                    const std::int8_t* brow = blk + (p - rb0) * layout.colBlock;
                    for (std::size_t j = cb0; j < cbEnd; ++j)
                        crow[j] += av * static_cast<std::int32_t>(brow[j - cb0]);
                }
            }
        }
    }
    return c;
}

}  // namespace

WeightChecksum compute_row_checksums(const quant::QuantI8& b) {
    if (b.data.empty()) throw std::invalid_argument("compute_row_checksums: empty matrix");
    WeightChecksum cs;
    cs.values.reserve(b.rows());
    for (std::size_t i = 0; i < b.rows(); ++i) {
        std::int64_t sum = 0;
        for (std::size_t j = 0; j < b.cols(); ++j)
            sum += static_cast<std::int64_t>(b.data(i, j));
        cs.values.push_back(static_cast<std::int8_t>(mod127(sum)));
    }
    return cs;
}

PackedEncodedWeight::PackedEncodedWeight(const quant::QuantI8& b, const WeightChecksum& cs,
                                         BlockLayout layout)
    : k_(b.rows()), n_(b.cols()), layout_(layout), scale_(b.scale), bias_(b.bias) {
    if (layout.rowBlock == 0 || layout.colBlock == 0)
        throw std::invalid_argument("PackedEncodedWeight: block sizes must be positive");
    if (cs.values.size() != k_)
        throw std::invalid_argument("PackedEncodedWeight: checksum length mismatch");
    rowBlocks_ = ceil_div(k_, layout.rowBlock);
    colBlocks_ = ceil_div(n_ + 1, layout.colBlock);
    buffer_ = pack_blocks(k_, n_ + 1, layout, [&](std::size_t i, std::size_t j) {
        return j < n_ ? b.data(i, j) : cs.values[i];
    });
}

std::int8_t PackedEncodedWeight::at(std::size_t i, std::size_t j) const {
    const std::size_t block = (i / layout_.rowBlock) * colBlocks_ + j / layout_.colBlock;
    return buffer_[block * layout_.rowBlock * layout_.colBlock +
                   (i % layout_.rowBlock) * layout_.colBlock + j % layout_.colBlock];
}

AbftGemmResult abft_gemm(const quant::QuantU8& a, const PackedEncodedWeight& pb) {
    if (a.cols() != pb.k()) throw std::invalid_argument("abft_gemm: dimension mismatch");
    AbftGemmResult res;
    res.cTemp.data = packed_gemm(a.data, pb.buffer(), pb.k(), pb.n() + 1, pb.layout());
    res.cTemp.hasChecksumColumn = true;
    res.errCount = verify_checksums(res.cTemp);
    return res;
}

quant::IntermediateMatrix plain_gemm(const quant::QuantU8& a, const quant::QuantI8& b,
                                     BlockLayout layout) {
    if (a.cols() != b.rows()) throw std::invalid_argument("plain_gemm: dimension mismatch");
    auto buf = pack_blocks(b.rows(), b.cols(), layout,
                           [&](std::size_t i, std::size_t j) { return b.data(i, j); });
    quant::IntermediateMatrix c;
    c.data = packed_gemm(a.data, buf, b.rows(), b.cols(), layout);
    c.hasChecksumColumn = false;
    return c;
}

std::size_t verify_checksums(const quant::IntermediateMatrix& c) {
    if (!c.hasChecksumColumn)
        throw std::invalid_argument("verify_checksums: missing checksum column");
    const std::size_t n = c.logicalCols();
    std::size_t errCount = 0;
    for (std::size_t i = 0; i < c.rows(); ++i) {
        std::int64_t tSum = 0;  // 64-bit: row sums of C_temp can exceed 32 bits
        for (std::size_t j = 0; j < n; ++j) tSum += c.data(i, j);
        if (mod127(tSum) != mod127(c.data(i, n))) ++errCount;
    }
    return errCount;
}

}  // namespace abft::gemm
