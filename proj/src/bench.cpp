#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "gemm_abft.hpp"

namespace abft::bench {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename Fn>
double time_ns(Fn&& fn) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::nano>(t1 - t0).count();
}

MatU8 random_u8(lab::SplitMix64& rng, std::size_t r, std::size_t c) {
    MatU8 m(r, c);
    for (auto& v : m.data()) v = static_cast<std::uint8_t>(rng.next_below(256));
    return m;
}

MatI8 random_i8(lab::SplitMix64& rng, std::size_t r, std::size_t c) {
    MatI8 m(r, c);
    for (auto& v : m.data()) v = static_cast<std::int8_t>(rng.next_int(-128, 127));
    return m;
}

void flush_cache(std::vector<char>& scratch) {
    for (std::size_t i = 0; i < scratch.size(); i += 64) scratch[i] += 1;
}

}  // namespace

BenchResult bench_gemm(const lab::GemmShape& shape, std::size_t repetitions,
                       std::uint64_t seed) {
    if (repetitions < kMinRepetitions)
        throw std::invalid_argument("bench_gemm: need at least 5 repetitions");
    lab::SplitMix64 rng(seed, 0);
    quant::QuantU8 a{random_u8(rng, shape.m, shape.k), 1.0, 0.0};
    quant::QuantI8 b{random_i8(rng, shape.k, shape.n), 1.0, 0.0};

    // Results must match on the first n columns; checked once up front.
    gemm::PackedEncodedWeight pb(b, gemm::compute_row_checksums(b));
    quant::IntermediateMatrix base = gemm::plain_gemm(a, b);
    gemm::AbftGemmResult checked = gemm::abft_gemm(a, pb);
    for (std::size_t i = 0; i < shape.m; ++i)
        for (std::size_t j = 0; j < shape.n; ++j)
            if (base.data(i, j) != checked.cTemp.data(i, j))
                throw std::runtime_error("bench_gemm: baseline and abft outputs diverge");

    auto baseline_run = [&] {
        volatile std::int32_t sink = gemm::plain_gemm(a, b).data(0, 0);
        (void)sink;
    };
    auto abft_run = [&] {
        gemm::PackedEncodedWeight enc(b, gemm::compute_row_checksums(b));
        volatile std::size_t sink = gemm::abft_gemm(a, enc).errCount;
        (void)sink;
    };

    for (int w = 0; w < 2; ++w) {
        baseline_run();
        abft_run();
    }
    std::vector<double> baseNs, abftNs;
    for (std::size_t r = 0; r < repetitions; ++r) {
        baseNs.push_back(time_ns(baseline_run));
        abftNs.push_back(time_ns(abft_run));
    }

    BenchResult res;
    res.label = std::to_string(shape.m) + "x" + std::to_string(shape.n) + "x" +
                std::to_string(shape.k);
    res.baselineNanos = median(baseNs);
    res.abftNanos = median(abftNs);
    res.overheadFraction = (res.abftNanos - res.baselineNanos) / res.baselineNanos;
    res.repetitions = repetitions;
    return res;
}

BenchResult bench_eb(std::size_t tableRows, std::size_t dim, std::size_t pooling,
                     std::size_t batch, std::size_t repetitions, std::uint64_t seed) {
    if (repetitions < kMinRepetitions)
        throw std::invalid_argument("bench_eb: need at least 5 repetitions");
    if (tableRows == 0 || dim == 0 || pooling == 0 || batch == 0)
        throw std::invalid_argument("bench_eb: invalid dimensions");
    lab::SplitMix64 rng(seed, 1);
    eb::QuantEmbeddingTable table;
    table.rows = random_i8(rng, tableRows, dim);
    table.scales.resize(tableRows);
    table.biases.resize(tableRows);
    for (auto& s : table.scales) s = static_cast<float>(rng.next_real(0.005, 0.02));
    for (auto& b : table.biases) b = static_cast<float>(rng.next_real(-1.0, 1.0));
    table.rowSums = eb::precompute_row_sums(table.rows);

    std::vector<eb::IndexBag> bags(batch);
    for (auto& bag : bags) {
        bag.indices.resize(pooling);
        for (auto& idx : bag.indices) idx = rng.next_below(tableRows);
    }

    std::vector<char> scratch(32 << 20);
    auto baseline_run = [&] {
        float sink = 0.0f;
        for (const auto& bag : bags) sink += eb::embedding_bag(table, bag)[0];
        volatile float s = sink;
        (void)s;
    };
    auto abft_run = [&] {
        bool sink = false;
        for (const auto& res : eb::batch_abft_eb(table, bags)) sink |= res.err;
        volatile bool s = sink;
        (void)s;
    };

    for (int w = 0; w < 2; ++w) {
        baseline_run();
        abft_run();
    }
    std::vector<double> baseNs, abftNs;
    for (std::size_t r = 0; r < repetitions; ++r) {
        flush_cache(scratch);
        baseNs.push_back(time_ns(baseline_run));
        flush_cache(scratch);
        abftNs.push_back(time_ns(abft_run));
    }

    BenchResult res;
    res.label = "eb_R" + std::to_string(tableRows) + "_d" + std::to_string(dim) + "_p" +
                std::to_string(pooling) + "_b" + std::to_string(batch);
    res.baselineNanos = median(baseNs);
    res.abftNanos = median(abftNs);
    res.overheadFraction = (res.abftNanos - res.baselineNanos) / res.baselineNanos;
    res.repetitions = repetitions;
    return res;
}

std::vector<lab::GemmShape> load_shapes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("shape file not found: " + path);
    std::vector<lab::GemmShape> shapes;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        lab::GemmShape s;
        char x1, x2;
        if (ls >> s.m >> x1 >> s.n >> x2 >> s.k) {
            if (x1 != 'x' || x2 != 'x' || s.m == 0 || s.n == 0 || s.k == 0)
                throw std::runtime_error("bad shape line in " + path + ": " + line);
            shapes.push_back(s);
        }
    }
    if (shapes.empty()) throw std::runtime_error("no shapes in " + path);
    return shapes;
}

std::string bench_to_csv(const std::vector<BenchResult>& results) {
    std::ostringstream out;
    out << "shape,baseline_ns,abft_ns,overhead_fraction,repetitions\n";
    for (const BenchResult& r : results)
        out << r.label << ',' << std::setprecision(10) << r.baselineNanos << ',' << r.abftNanos
            << ',' << r.overheadFraction << ',' << r.repetitions << '\n';
    return out.str();
}

}  // namespace abft::bench
