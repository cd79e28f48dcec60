#include <cmath>

#include "doctest.h"
#include "quant.hpp"
#include "rng.hpp"

using namespace abft;
using namespace abft::quant;

namespace {

MatF64 random_real_matrix(lab::SplitMix64& rng, std::size_t r, std::size_t c, double lo,
                          double hi) {
    MatF64 m(r, c);
    for (auto& v : m.data()) v = rng.next_real(lo, hi);
    return m;
}

}  // namespace

TEST_CASE("quantize_affine: degenerate all-zero range") {
    MatF64 zeros(2, 2, 0.0);
    QuantU8 q = quantize_affine_u8(zeros);
    CHECK(q.scale == 1.0);
    CHECK(q.bias == 0.0);
    for (auto v : q.data.data()) CHECK(v == 0);
}

TEST_CASE("quantize_affine: exact affine fit on a uniform grid") {
    MatF64 grid(16, 16);
    for (std::size_t i = 0; i < 256; ++i) grid.data()[i] = 0.01 * static_cast<double>(i);
    QuantU8 q = quantize_affine_u8(grid);
    CHECK(q.scale == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(q.bias == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t i = 0; i < 256; ++i) CHECK(q.data.data()[i] == i);
}

TEST_CASE("quantize_affine: signed round-trip error within scale/2") {
    lab::SplitMix64 rng(101);
    MatF64 values = random_real_matrix(rng, 4, 4, -1.0, 1.0);
    QuantI8 q = quantize_affine_i8(values);
    MatF64 back = dequantize(q);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(std::abs(back(i, j) - values(i, j)) <= q.scale / 2 + 1e-12);
}

TEST_CASE("quantize_affine: rejects empty and non-finite input") {
    CHECK_THROWS_AS(quantize_affine_u8(MatF64{}), std::invalid_argument);
    MatF64 bad(1, 2);
    bad(0, 0) = 1.0;
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(quantize_affine_u8(bad), std::invalid_argument);
}

TEST_CASE("dequantize: direct evaluation") {
    QuantI8 a{MatI8(1, 1, std::vector<std::int8_t>{0}), 1.0, 0.0};
    CHECK(dequantize(a)(0, 0) == 0.0);
    QuantI8 b{MatI8(1, 1, std::vector<std::int8_t>{100}), 0.01, 0.0};
    CHECK(dequantize(b)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("quantize(dequantize(q)) reproduces stored integers") {
    lab::SplitMix64 rng(202);
    for (int rep = 0; rep < 50; ++rep) {
        QuantI8 q;
        q.data = MatI8(3, 5);
        for (auto& v : q.data.data()) v = static_cast<std::int8_t>(rng.next_int(-128, 127));
        // Ensure the full signed range is present so the affine fit is identical.
        q.data(0, 0) = -128;
        q.data(0, 1) = 127;
        q.scale = rng.next_real(0.001, 0.1);
        q.bias = rng.next_real(-2.0, 2.0);
        QuantI8 round = quantize_affine_i8(dequantize(q));
        CHECK(round.data == q.data);
    }
}

TEST_CASE("reference_quantized_product: rank-1 terms vanish with zero biases") {
    lab::SplitMix64 rng(303);
    QuantU8 a{MatU8(2, 3), 0.5, 0.0};
    QuantI8 b{MatI8(3, 2), 0.25, 0.0};
    for (auto& v : a.data.data()) v = static_cast<std::uint8_t>(rng.next_below(256));
    for (auto& v : b.data.data()) v = static_cast<std::int8_t>(rng.next_int(-128, 127));
    MatF64 out = reference_quantized_product(a, b);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            std::int32_t acc = 0;
            for (std::size_t p = 0; p < 3; ++p)
                acc += static_cast<std::int32_t>(a.data(i, p)) * b.data(p, j);
            CHECK(out(i, j) == doctest::Approx(0.5 * 0.25 * acc));
        }
}

TEST_CASE("reference_quantized_product: 1x1 hand expansion") {
    QuantU8 a{MatU8(1, 1, std::vector<std::uint8_t>{2}), 0.5, 1.0};
    QuantI8 b{MatI8(1, 1, std::vector<std::int8_t>{3}), 2.0, -1.0};
    // (0.5*2 + 1) * (2*3 - 1) = 2 * 5 = 10
    CHECK(reference_quantized_product(a, b)(0, 0) == doctest::Approx(10.0));
}

TEST_CASE("reference_quantized_product matches dense dequantized product") {
    lab::SplitMix64 rng(404);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t m = 1 + rng.next_below(16);
        const std::size_t k = 1 + rng.next_below(16);
        const std::size_t n = 1 + rng.next_below(16);
        QuantU8 a{MatU8(m, k), rng.next_real(0.001, 0.1), rng.next_real(-1.0, 1.0)};
        QuantI8 b{MatI8(k, n), rng.next_real(0.001, 0.1), rng.next_real(-1.0, 1.0)};
        for (auto& v : a.data.data()) v = static_cast<std::uint8_t>(rng.next_below(256));
        for (auto& v : b.data.data()) v = static_cast<std::int8_t>(rng.next_int(-128, 127));

        MatF64 fast = reference_quantized_product(a, b);
        MatF64 da = dequantize(a), db = dequantize(b);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double dense = 0.0;
                for (std::size_t p = 0; p < k; ++p) dense += da(i, p) * db(p, j);
                CHECK(fast(i, j) ==
                      doctest::Approx(dense).epsilon(1e-6).scale(std::abs(dense) + 1.0));
            }
    }
}

TEST_CASE("requantize: zero propagation and saturation") {
    IntermediateMatrix c{MatI32(2, 2, 0), false};
    RequantParams p{1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 2};
    QuantU8 out = requantize(c, {0, 0}, {0, 0}, p);
    for (auto v : out.data.data()) CHECK(v == 0);

    IntermediateMatrix big{MatI32(1, 1, std::vector<std::int32_t>{0}), false};
    RequantParams ps{1.0, 0.0, 1.0, 0.0, 1.0, -300.2, 1};  // (0 - (-300.2)) / 1 = 300.2
    CHECK(requantize(big, {0}, {0}, ps).data(0, 0) == 255);
}

TEST_CASE("requantize: validation errors") {
    IntermediateMatrix c{MatI32(2, 2, 0), false};
    RequantParams p;
    CHECK_THROWS_AS(requantize(c, {0}, {0, 0}, p), std::invalid_argument);
    CHECK_THROWS_AS(requantize(c, {0, 0}, {0}, p), std::invalid_argument);
    RequantParams bad;
    bad.scaleC = 0.0;
    CHECK_THROWS_AS(requantize(c, {0, 0}, {0, 0}, bad), std::invalid_argument);
}

TEST_CASE("requantize agrees with reference_quantized_product oracle") {
    lab::SplitMix64 rng(505);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t m = 4, k = 4, n = 4;
        QuantU8 a{MatU8(m, k), rng.next_real(0.001, 0.05), rng.next_real(-0.5, 0.5)};
        QuantI8 b{MatI8(k, n), rng.next_real(0.001, 0.05), rng.next_real(-0.5, 0.5)};
        for (auto& v : a.data.data()) v = static_cast<std::uint8_t>(rng.next_below(256));
        for (auto& v : b.data.data()) v = static_cast<std::int8_t>(rng.next_int(-128, 127));

        MatF64 oracle = reference_quantized_product(a, b);
        double lo = oracle(0, 0), hi = oracle(0, 0);
        for (double v : oracle.data()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        RequantParams p;
        p.scaleA = a.scale;
        p.biasA = a.bias;
        p.scaleB = b.scale;
        p.biasB = b.bias;
        p.scaleC = std::max((hi - lo) / 255.0, 1e-9);
        p.biasC = lo;
        p.k = k;

        IntermediateMatrix c;
        c.data = MatI32(m, n, 0);
        c.hasChecksumColumn = false;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t q = 0; q < k; ++q)
                    c.data(i, j) += static_cast<std::int32_t>(a.data(i, q)) * b.data(q, j);

        QuantU8 out = requantize(c, row_sums(a.data), col_sums(b.data), p);
        MatF64 back = dequantize(out);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                CHECK(std::abs(back(i, j) - oracle(i, j)) <= p.scaleC / 2 + 1e-6);
    }
}

TEST_CASE("requantize never reads the checksum column") {
    lab::SplitMix64 rng(606);
    const std::size_t m = 3, n = 4;
    IntermediateMatrix noCs{MatI32(m, n), false};
    IntermediateMatrix withCs{MatI32(m, n + 1), true};
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            auto v = static_cast<std::int32_t>(rng.next_int(-100000, 100000));
            noCs.data(i, j) = v;
            withCs.data(i, j) = v;
        }
        withCs.data(i, n) = static_cast<std::int32_t>(rng.next());  // arbitrary junk
    }
    RequantParams p{0.01, 0.2, 0.02, -0.1, 0.5, -3.0, 7};
    std::vector<std::int32_t> rs{10, 20, 30}, cs{1, 2, 3, 4};
    CHECK(requantize(noCs, rs, cs, p).data == requantize(withCs, rs, cs, p).data);
}

TEST_CASE("requantization is not linear: Q(a) + Q(b) != Q(a+b) witness") {
    RequantParams p{1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 1};  // Q(c) = round(c / 2)
    auto q = [&](std::int32_t v) {
        IntermediateMatrix c{MatI32(1, 1, std::vector<std::int32_t>{v}), false};
        return static_cast<int>(requantize(c, {0}, {0}, p).data(0, 0));
    };
    CHECK(q(1) + q(1) != q(2));  // 1 + 1 != 1 under round-half-away
}
