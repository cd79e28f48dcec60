#include "abftlp.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "bench.hpp"
#include "detection_model.hpp"
#include "fault_lab.hpp"

struct abftlp_campaign_s {
    abft::lab::CampaignConfig cfg;
};

struct abftlp_report_s {
    abft::lab::CampaignReport report;
};

namespace {

thread_local std::string g_last_error;

abftlp_status fail(abftlp_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename Fn>
abftlp_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(ABFTLP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(ABFTLP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::runtime_error& e) {
        return fail(ABFTLP_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(ABFTLP_ERR_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* abftlp_status_str(abftlp_status status) {
    switch (status) {
        case ABFTLP_OK: return "ok";
        case ABFTLP_ERR_INVALID_ARGUMENT: return "invalid argument";
        case ABFTLP_ERR_IO: return "i/o error";
        case ABFTLP_ERR_PARSE: return "parse error";
        case ABFTLP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* abftlp_last_error(void) { return g_last_error.c_str(); }

abftlp_status abftlp_campaign_load(const char* config_path, abftlp_campaign** out) {
    if (!config_path || !out)
        return fail(ABFTLP_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::ifstream in(config_path);
        if (!in)
            return fail(ABFTLP_ERR_IO, std::string("config not found: ") + config_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            *out = new abftlp_campaign_s{abft::lab::parse_campaign_config(buf.str())};
        } catch (const std::invalid_argument& e) {
            return fail(ABFTLP_ERR_PARSE, e.what());
        }
        return ABFTLP_OK;
    });
}

abftlp_status abftlp_campaign_parse(const char* config_text, abftlp_campaign** out) {
    if (!config_text || !out)
        return fail(ABFTLP_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        try {
            *out = new abftlp_campaign_s{abft::lab::parse_campaign_config(config_text)};
        } catch (const std::invalid_argument& e) {
            return fail(ABFTLP_ERR_PARSE, e.what());
        }
        return ABFTLP_OK;
    });
}

void abftlp_campaign_free(abftlp_campaign* campaign) { delete campaign; }

abftlp_status abftlp_campaign_run(const abftlp_campaign* campaign, abftlp_report** out) {
    if (!campaign || !out)
        return fail(ABFTLP_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new abftlp_report_s{abft::lab::run_campaign(campaign->cfg)};
        return ABFTLP_OK;
    });
}

void abftlp_report_free(abftlp_report* report) { delete report; }

uint64_t abftlp_report_trials(const abftlp_report* report) { return report->report.trials; }

uint64_t abftlp_report_detected(const abftlp_report* report) { return report->report.detected; }

uint64_t abftlp_report_false_positives(const abftlp_report* report) {
    return report->report.falsePositives;
}

double abftlp_report_detection_rate(const abftlp_report* report) {
    return report->report.detectionRate();
}

abftlp_status abftlp_report_write_csv(const abftlp_report* report, const char* path) {
    if (!report || !path)
        return fail(ABFTLP_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::ofstream out(path);
        if (!out) return fail(ABFTLP_ERR_IO, std::string("cannot write: ") + path);
        out << abft::lab::report_to_csv(report->report);
        return out ? ABFTLP_OK : fail(ABFTLP_ERR_IO, std::string("write failed: ") + path);
    });
}

abftlp_status abftlp_report_render(const abftlp_report* report, char** out) {
    if (!report || !out)
        return fail(ABFTLP_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = dup_string(abft::lab::report_to_table(report->report));
        return ABFTLP_OK;
    });
}

void abftlp_string_free(char* s) { delete[] s; }

abftlp_status abftlp_analyze(uint64_t m, uint64_t n, uint64_t k, uint64_t d, uint64_t pool,
                             abftlp_analysis* out) {
    if (!out) return fail(ABFTLP_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        using namespace abft::model;
        abftlp_analysis a{};
        a.encode_overhead_a = encode_overhead(EncodedSide::A, m, n, k);
        a.encode_overhead_b = encode_overhead(EncodedSide::B, m, n, k);
        a.p_detect_b_bitflip = detect_prob_error_in_B(FaultModel::single_bit_flip, m).probability;
        a.p_detect_b_random = detect_prob_error_in_B(FaultModel::random_value, m).probability;
        a.p_detect_c_bitflip = detect_prob_error_in_C(FaultModel::single_bit_flip).probability;
        a.p_detect_c_random = detect_prob_error_in_C(FaultModel::random_value).probability;
        a.eb_overhead = eb_overhead(pool, d);
        a.eb_memory_overhead = eb_memory_overhead(8, d);
        *out = a;
        return ABFTLP_OK;
    });
}

abftlp_status abftlp_bench_gemm(uint64_t m, uint64_t n, uint64_t k, uint32_t repetitions,
                                uint64_t seed, abftlp_bench_result* out) {
    if (!out) return fail(ABFTLP_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        abft::bench::BenchResult r =
            abft::bench::bench_gemm({m, n, k}, repetitions, seed);
        *out = {r.baselineNanos, r.abftNanos, r.overheadFraction};
        return ABFTLP_OK;
    });
}

abftlp_status abftlp_bench_eb(uint64_t table_rows, uint64_t dim, uint64_t pooling,
                              uint64_t batch, uint32_t repetitions, uint64_t seed,
                              abftlp_bench_result* out) {
    if (!out) return fail(ABFTLP_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        abft::bench::BenchResult r =
            abft::bench::bench_eb(table_rows, dim, pooling, batch, repetitions, seed);
        *out = {r.baselineNanos, r.abftNanos, r.overheadFraction};
        return ABFTLP_OK;
    });
}

abftlp_status abftlp_eb_check_files(const char* table_path, const char* indices_path,
                                    int skip_validation, uint64_t* bags_out,
                                    uint64_t* flagged_out, char** render_out) {
    if (!table_path || !indices_path)
        return fail(ABFTLP_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        abft::eb::QuantEmbeddingTable table =
            abft::eb::load_table(table_path, skip_validation == 0);

        std::ifstream in(indices_path);
        if (!in)
            return fail(ABFTLP_ERR_IO, std::string("indices file not found: ") + indices_path);
        std::vector<abft::eb::IndexBag> bags;
        std::string line;
        while (std::getline(in, line)) {
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            abft::eb::IndexBag bag;
            std::vector<float> weights;
            bool weighted = false;
            std::string tok;
            while (ls >> tok) {
                std::size_t colon = tok.find(':');
                try {
                    if (colon == std::string::npos) {
                        bag.indices.push_back(std::stoull(tok));
                        weights.push_back(1.0f);
                    } else {
                        bag.indices.push_back(std::stoull(tok.substr(0, colon)));
                        weights.push_back(std::stof(tok.substr(colon + 1)));
                        weighted = true;
                    }
                } catch (const std::exception&) {
                    return fail(ABFTLP_ERR_PARSE, "bad index token: " + tok);
                }
            }
            if (bag.indices.empty() && line.find_first_not_of(" \t\r") == std::string::npos)
                continue;  // blank line
            if (weighted) bag.weights = std::move(weights);
            bags.push_back(std::move(bag));
        }

        std::vector<abft::eb::EbCheckedResult> results = abft::eb::batch_abft_eb(table, bags);
        uint64_t flagged = 0;
        std::ostringstream render;
        for (std::size_t i = 0; i < results.size(); ++i) {
            flagged += results[i].err ? 1 : 0;
            render << "bag " << i << ": " << (results[i].err ? "ERROR" : "ok")
                   << " rsum=" << results[i].rSum << " csum=" << results[i].cSum << "\n";
        }
        if (bags_out) *bags_out = results.size();
        if (flagged_out) *flagged_out = flagged;
        if (render_out) *render_out = dup_string(render.str());
        return ABFTLP_OK;
    });
}

}  // extern "C"
