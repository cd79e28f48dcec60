#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "detection_model.hpp"
#include "embedding_abft.hpp"
#include "quant.hpp"
#include "rng.hpp"

namespace abft::lab {

enum class FaultTarget { weight_B, intermediate_C, eb_table, none };

enum class BitRange { all, high4, low4 };

struct FaultSpec {
    FaultTarget target = FaultTarget::none;
    model::FaultModel model = model::FaultModel::single_bit_flip;
    BitRange bitRange = BitRange::all;  // bit-flip model only
    std::uint64_t seed = 0;
};

struct GemmShape {
    std::size_t m = 1, n = 1, k = 1;
};

struct GemmWorkload {
    std::vector<GemmShape> shapes;
    std::size_t trialsPerShape = 100;
};

struct EbWorkload {
    std::size_t tableRows = 100000;
    std::size_t tableDim = 64;
    std::size_t pooling = 100;
    std::size_t batch = 10;
    std::size_t trials = 200;
};

struct CampaignConfig {
    std::optional<GemmWorkload> gemm;  // exactly one workload set
    std::optional<EbWorkload> eb;
    FaultSpec fault;
    std::size_t threads = 0;  // 0 = hardware default
};

struct FaultRecord {
    bool injected = false;
    std::string position;  // human-readable coordinates
    std::int64_t before = 0;
    std::int64_t after = 0;
};

struct ShapeStats {
    std::string label;
    std::uint64_t trials = 0;
    std::uint64_t detected = 0;
    std::uint64_t falsePositives = 0;
};

struct CampaignReport {
    std::string target;
    std::string model;
    std::string bitRange;
    std::uint64_t trials = 0;
    std::uint64_t detected = 0;
    std::uint64_t notDetected = 0;
    std::uint64_t falsePositives = 0;  // control runs only
    std::vector<ShapeStats> perShape;
    std::string notes;  // protocol metadata (e.g. checksum column excluded)

    double detectionRate() const {
        return trials ? static_cast<double>(detected) / static_cast<double>(trials) : 0.0;
    }
};

struct WilsonInterval {
    double low = 0.0;
    double high = 0.0;
};

template <typename T>
T flip_bit(T value, unsigned bitIndex) {
    static_assert(std::is_integral_v<T>);
    if (bitIndex >= sizeof(T) * 8) throw std::out_of_range("flip_bit: bit index out of range");
    using U = std::make_unsigned_t<T>;
    return static_cast<T>(static_cast<U>(value) ^ (U{1} << bitIndex));
}

// Bit index draw honoring the configured range.
unsigned draw_bit_index(SplitMix64& rng, BitRange range, unsigned width);

// Injection points match the evaluation protocol: B after encoding,
// C_temp after the product, the table after row sums. Each mutates
// exactly one element, deterministically in (spec.seed, trialIndex).
FaultRecord inject_weight_B(MatI8& b, const FaultSpec& spec, std::uint64_t trialIndex);
FaultRecord inject_intermediate_C(quant::IntermediateMatrix& c, const FaultSpec& spec,
                                  std::uint64_t trialIndex);
FaultRecord inject_eb_table(eb::QuantEmbeddingTable& table,
                            const std::vector<eb::IndexBag>& bags, const FaultSpec& spec,
                            std::uint64_t trialIndex);

CampaignReport run_gemm_campaign(const CampaignConfig& cfg);
CampaignReport run_eb_campaign(const CampaignConfig& cfg);
CampaignReport run_campaign(const CampaignConfig& cfg);

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials);

// Parses the key/value campaign file format; throws on malformed input.
CampaignConfig parse_campaign_config(const std::string& text);
CampaignConfig load_campaign_config(const std::string& path);

std::string report_to_csv(const CampaignReport& report);
std::string report_to_table(const CampaignReport& report);

}  // namespace abft::lab
