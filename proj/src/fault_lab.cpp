#include "fault_lab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "gemm_abft.hpp"

namespace abft::lab {

namespace {

// Per-trial stream ids, one per random role, so draws never interleave.
enum Stream : std::uint64_t { kData = 0, kInject = 1, kBags = 2, kStride = 4 };

SplitMix64 trial_rng(std::uint64_t seed, std::uint64_t trialIndex, Stream role) {
    return SplitMix64(seed, trialIndex * kStride + role);
}

std::string coord(std::size_t i, std::size_t j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

const char* target_name(FaultTarget t) {
    switch (t) {
        case FaultTarget::weight_B: return "weight_b";
        case FaultTarget::intermediate_C: return "intermediate_c";
        case FaultTarget::eb_table: return "eb_table";
        case FaultTarget::none: return "none";
    }
    return "?";
}

const char* model_name(model::FaultModel m) {
    return m == model::FaultModel::single_bit_flip ? "single_bit_flip" : "random_value";
}

const char* bit_range_name(BitRange r) {
    switch (r) {
        case BitRange::all: return "all";
        case BitRange::high4: return "high4";
        case BitRange::low4: return "low4";
    }
    return "?";
}

std::size_t worker_count(const CampaignConfig& cfg) {
    if (cfg.threads) return cfg.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Runs fn(trialIndex) for every trial on a static partition; per-trial
// results land in a fixed slot so the schedule never changes the report.
template <typename Fn>
void parallel_trials(std::size_t trials, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, trials ? trials : 1));
    if (workers == 1) {
        for (std::size_t t = 0; t < trials; ++t) fn(t);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t t = w; t < trials; t += workers) fn(t);
        });
    }
    for (auto& th : pool) th.join();
}

MatU8 random_u8_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols) {
    MatU8 m(rows, cols);
    for (auto& v : m.data()) v = static_cast<std::uint8_t>(rng.next_below(256));
    return m;
}

MatI8 random_i8_matrix(SplitMix64& rng, std::size_t rows, std::size_t cols) {
    MatI8 m(rows, cols);
    for (auto& v : m.data()) v = static_cast<std::int8_t>(rng.next_int(-128, 127));
    return m;
}

}  // namespace

unsigned draw_bit_index(SplitMix64& rng, BitRange range, unsigned width) {
    switch (range) {
        case BitRange::high4: return width - 4 + static_cast<unsigned>(rng.next_below(4));
        case BitRange::low4: return static_cast<unsigned>(rng.next_below(4));
        case BitRange::all: break;
    }
    return static_cast<unsigned>(rng.next_below(width));
}

FaultRecord inject_weight_B(MatI8& b, const FaultSpec& spec, std::uint64_t trialIndex) {
    if (spec.target == FaultTarget::none) return {};
    SplitMix64 rng = trial_rng(spec.seed, trialIndex, kInject);
    const std::size_t i = rng.next_below(b.rows());
    const std::size_t j = rng.next_below(b.cols());
    std::int8_t& cell = b(i, j);
    FaultRecord rec{true, coord(i, j), cell, 0};
    if (spec.model == model::FaultModel::single_bit_flip) {
        cell = flip_bit(cell, draw_bit_index(rng, spec.bitRange, 8));
    } else {
        std::int8_t nv;
        do {
            nv = static_cast<std::int8_t>(rng.next_int(-128, 127));
        } while (nv == cell);
        cell = nv;
    }
    rec.after = cell;
    return rec;
}

FaultRecord inject_intermediate_C(quant::IntermediateMatrix& c, const FaultSpec& spec,
                                  std::uint64_t trialIndex) {
    if (spec.target == FaultTarget::none) return {};
    SplitMix64 rng = trial_rng(spec.seed, trialIndex, kInject);
    const std::size_t i = rng.next_below(c.data.rows());
    const std::size_t j = rng.next_below(c.data.cols());
    std::int32_t& cell = c.data(i, j);
    FaultRecord rec{true, coord(i, j), cell, 0};
    if (spec.model == model::FaultModel::single_bit_flip) {
        cell = flip_bit(cell, draw_bit_index(rng, spec.bitRange, 32));
    } else {
        std::int32_t nv;
        do {
            nv = static_cast<std::int32_t>(rng.next());
        } while (nv == cell);
        cell = nv;
    }
    rec.after = cell;
    return rec;
}

FaultRecord inject_eb_table(eb::QuantEmbeddingTable& table,
                            const std::vector<eb::IndexBag>& bags, const FaultSpec& spec,
                            std::uint64_t trialIndex) {
    if (spec.target == FaultTarget::none) return {};
    // Corrupt an element actually pooled by some bag, as the evaluation
    // reads it; rows outside every bag cannot influence any check.
    SplitMix64 rng = trial_rng(spec.seed, trialIndex, kInject);
    std::vector<std::size_t> usable;
    for (std::size_t b = 0; b < bags.size(); ++b)
        if (!bags[b].indices.empty()) usable.push_back(b);
    if (usable.empty()) throw std::invalid_argument("inject_eb_table: all bags empty");
    const auto& bag = bags[usable[rng.next_below(usable.size())]];
    const std::size_t row = bag.indices[rng.next_below(bag.indices.size())];
    const std::size_t col = rng.next_below(table.dim());
    std::int8_t& cell = table.rows(row, col);
    FaultRecord rec{true, coord(row, col), cell, 0};
    if (spec.model == model::FaultModel::single_bit_flip) {
        cell = flip_bit(cell, draw_bit_index(rng, spec.bitRange, 8));
    } else {
        std::int8_t nv;
        do {
            nv = static_cast<std::int8_t>(rng.next_int(-128, 127));
        } while (nv == cell);
        cell = nv;
    }
    rec.after = cell;
    return rec;
}

CampaignReport run_gemm_campaign(const CampaignConfig& cfg) {
    if (!cfg.gemm) throw std::invalid_argument("run_gemm_campaign: not a gemm workload");
    const GemmWorkload& wl = *cfg.gemm;
    if (wl.shapes.empty() || wl.trialsPerShape == 0)
        throw std::invalid_argument("run_gemm_campaign: empty workload");
    if (cfg.fault.target == FaultTarget::eb_table)
        throw std::invalid_argument("run_gemm_campaign: eb_table target on gemm workload");

    const std::size_t total = wl.shapes.size() * wl.trialsPerShape;
    std::vector<std::uint8_t> detectedFlags(total, 0);

    parallel_trials(total, worker_count(cfg), [&](std::size_t t) {
        const GemmShape& shape = wl.shapes[t / wl.trialsPerShape];
        SplitMix64 rng = trial_rng(cfg.fault.seed, t, kData);
        quant::QuantU8 a{random_u8_matrix(rng, shape.m, shape.k), 1.0, 0.0};
        quant::QuantI8 b{random_i8_matrix(rng, shape.k, shape.n), 1.0, 0.0};

        gemm::WeightChecksum cs = gemm::compute_row_checksums(b);
        if (cfg.fault.target == FaultTarget::weight_B)
            inject_weight_B(b.data, cfg.fault, t);
        gemm::PackedEncodedWeight pb(b, cs);

        gemm::AbftGemmResult res = gemm::abft_gemm(a, pb);
        std::size_t errCount = res.errCount;
        if (cfg.fault.target == FaultTarget::intermediate_C) {
            inject_intermediate_C(res.cTemp, cfg.fault, t);
            errCount = gemm::verify_checksums(res.cTemp);
        }
        detectedFlags[t] = errCount > 0 ? 1 : 0;
    });

    CampaignReport rep;
    rep.target = target_name(cfg.fault.target);
    rep.model = model_name(cfg.fault.model);
    rep.bitRange = bit_range_name(cfg.fault.bitRange);
    rep.notes = "checksum column excluded from weight_B injection";
    const bool control = cfg.fault.target == FaultTarget::none;
    for (std::size_t s = 0; s < wl.shapes.size(); ++s) {
        ShapeStats st;
        const GemmShape& shape = wl.shapes[s];
        st.label = std::to_string(shape.m) + "x" + std::to_string(shape.n) + "x" +
                   std::to_string(shape.k);
        st.trials = wl.trialsPerShape;
        for (std::size_t t = 0; t < wl.trialsPerShape; ++t) {
            const bool d = detectedFlags[s * wl.trialsPerShape + t] != 0;
            if (control)
                st.falsePositives += d;
            else
                st.detected += d;
        }
        rep.perShape.push_back(st);
        rep.trials += st.trials;
        rep.detected += st.detected;
        rep.falsePositives += st.falsePositives;
    }
    rep.notDetected = rep.trials - rep.detected;
    return rep;
}

CampaignReport run_eb_campaign(const CampaignConfig& cfg) {
    if (!cfg.eb) throw std::invalid_argument("run_eb_campaign: not an eb workload");
    const EbWorkload& wl = *cfg.eb;
    if (wl.trials == 0 || wl.tableRows == 0 || wl.tableDim == 0 || wl.pooling == 0 ||
        wl.batch == 0)
        throw std::invalid_argument("run_eb_campaign: empty workload");
    if (cfg.fault.target == FaultTarget::weight_B ||
        cfg.fault.target == FaultTarget::intermediate_C)
        throw std::invalid_argument("run_eb_campaign: gemm target on eb workload");

    std::vector<std::uint8_t> detectedFlags(wl.trials, 0);

    parallel_trials(wl.trials, worker_count(cfg), [&](std::size_t t) {
        SplitMix64 rng = trial_rng(cfg.fault.seed, t, kData);
        eb::QuantEmbeddingTable table;
        table.rows = random_i8_matrix(rng, wl.tableRows, wl.tableDim);
        table.scales.resize(wl.tableRows);
        table.biases.resize(wl.tableRows);
        for (auto& s : table.scales) s = static_cast<float>(rng.next_real(0.005, 0.02));
        for (auto& b : table.biases) b = static_cast<float>(rng.next_real(-1.0, 1.0));
        table.rowSums = eb::precompute_row_sums(table.rows);

        SplitMix64 bagRng = trial_rng(cfg.fault.seed, t, kBags);
        std::vector<eb::IndexBag> bags(wl.batch);
        for (auto& bag : bags) {
            bag.indices.resize(wl.pooling);
            for (auto& idx : bag.indices) idx = bagRng.next_below(wl.tableRows);
        }

        if (cfg.fault.target == FaultTarget::eb_table)
            inject_eb_table(table, bags, cfg.fault, t);

        bool anyErr = false;
        for (const auto& res : eb::batch_abft_eb(table, bags)) anyErr |= res.err;
        detectedFlags[t] = anyErr ? 1 : 0;
    });

    CampaignReport rep;
    rep.target = target_name(cfg.fault.target);
    rep.model = model_name(cfg.fault.model);
    rep.bitRange = bit_range_name(cfg.fault.bitRange);
    ShapeStats st;
    st.label = "R" + std::to_string(wl.tableRows) + "_d" + std::to_string(wl.tableDim) + "_p" +
               std::to_string(wl.pooling) + "_b" + std::to_string(wl.batch);
    st.trials = wl.trials;
    const bool control = cfg.fault.target == FaultTarget::none;
    for (std::uint8_t f : detectedFlags) {
        if (control)
            st.falsePositives += f;
        else
            st.detected += f;
    }
    rep.perShape.push_back(st);
    rep.trials = st.trials;
    rep.detected = st.detected;
    rep.falsePositives = st.falsePositives;
    rep.notDetected = rep.trials - rep.detected;
    return rep;
}

CampaignReport run_campaign(const CampaignConfig& cfg) {
    if (cfg.gemm && cfg.eb)
        throw std::invalid_argument("run_campaign: config sets both gemm and eb workloads");
    if (cfg.gemm) return run_gemm_campaign(cfg);
    if (cfg.eb) return run_eb_campaign(cfg);
    throw std::invalid_argument("run_campaign: no workload configured");
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) throw std::invalid_argument("wilson_interval: zero trials");
    const double z = 1.959963984540054;  // 95%
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace abft::lab
