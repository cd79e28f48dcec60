#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "abftlp.h"

namespace {

uint64_t default_seed() {
    if (const char* env = std::getenv("ABFTLP_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring malformed ABFTLP_SEED\n";
        }
    }
    return 0;
}

int die(abftlp_status st, const std::string& what) {
    std::cerr << "error (" << abftlp_status_str(st) << "): " << what << ": "
              << abftlp_last_error() << "\n";
    return 1;
}

struct Shape {
    uint64_t m, n, k;
};

std::vector<Shape> read_shapes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("shape file not found: " + path);
    std::vector<Shape> shapes;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        Shape s{};
        char x1, x2;
        if (ls >> s.m >> x1 >> s.n >> x2 >> s.k) {
            if (x1 != 'x' || x2 != 'x')
                throw std::runtime_error("bad shape line: " + line);
            shapes.push_back(s);
        }
    }
    if (shapes.empty()) throw std::runtime_error("no shapes in " + path);
    return shapes;
}

int cmd_campaign(const std::string& configPath, std::string outPath) {
    abftlp_campaign* campaign = nullptr;
    abftlp_status st = abftlp_campaign_load(configPath.c_str(), &campaign);
    if (st != ABFTLP_OK) return die(st, "loading " + configPath);

    abftlp_report* report = nullptr;
    st = abftlp_campaign_run(campaign, &report);
    abftlp_campaign_free(campaign);
    if (st != ABFTLP_OK) return die(st, "running campaign");

    if (outPath.empty()) outPath = configPath + ".report.csv";
    st = abftlp_report_write_csv(report, outPath.c_str());
    if (st != ABFTLP_OK) {
        abftlp_report_free(report);
        return die(st, "writing " + outPath);
    }

    char* rendered = nullptr;
    if (abftlp_report_render(report, &rendered) == ABFTLP_OK) {
        std::cout << rendered;
        abftlp_string_free(rendered);
    }
    std::cout << "report written to " << outPath << "\n";
    abftlp_report_free(report);
    return 0;
}

int cmd_analyze(uint64_t m, uint64_t n, uint64_t k, uint64_t d, uint64_t pool) {
    abftlp_analysis a{};
    abftlp_status st = abftlp_analyze(m, n, k, d, pool, &a);
    if (st != ABFTLP_OK) return die(st, "analyze");

    std::cout << std::fixed << std::setprecision(4);
    std::cout << "GEMM shape " << m << "x" << n << "x" << k << "\n"
              << "  encode overhead, A side: " << 100.0 * a.encode_overhead_a << "%\n"
              << "  encode overhead, B side: " << 100.0 * a.encode_overhead_b << "%\n"
              << "  detection, error in B, bit flip:      " << 100.0 * a.p_detect_b_bitflip
              << "%\n"
              << "  detection, error in B, random value: >= "
              << 100.0 * a.p_detect_b_random << "%\n"
              << "  detection, error in C, bit flip:      " << 100.0 * a.p_detect_c_bitflip
              << "%\n"
              << "  detection, error in C, random value: >= "
              << 100.0 * a.p_detect_c_random << "%\n"
              << "EmbeddingBag d=" << d << " pooling=" << pool << "\n"
              << "  check overhead:  " << 100.0 * a.eb_overhead << "%\n"
              << "  memory overhead: " << 100.0 * a.eb_memory_overhead << "%\n";
    return 0;
}

int cmd_bench(const std::string& shapesPath, uint32_t reps, const std::string& outPath,
              uint64_t ebRows) {
    std::vector<Shape> shapes;
    try {
        shapes = read_shapes(shapesPath);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    const uint64_t seed = default_seed();
    std::ostringstream csv;
    csv << "shape,baseline_ns,abft_ns,overhead_fraction,repetitions\n";
    for (const Shape& s : shapes) {
        abftlp_bench_result r{};
        abftlp_status st = abftlp_bench_gemm(s.m, s.n, s.k, reps, seed, &r);
        if (st != ABFTLP_OK) return die(st, "bench gemm");
        csv << s.m << 'x' << s.n << 'x' << s.k << ',' << r.baseline_ns << ',' << r.abft_ns
            << ',' << r.overhead_fraction << ',' << reps << '\n';
        std::cout << "gemm " << s.m << 'x' << s.n << 'x' << s.k << ": overhead "
                  << std::fixed << std::setprecision(2) << 100.0 * r.overhead_fraction
                  << "%\n";
    }
    for (uint64_t dim : {32, 64, 128, 256}) {
        abftlp_bench_result r{};
        abftlp_status st = abftlp_bench_eb(ebRows, dim, 100, 10, reps, seed, &r);
        if (st != ABFTLP_OK) return die(st, "bench eb");
        csv << "eb_R" << ebRows << "_d" << dim << "_p100_b10," << r.baseline_ns << ','
            << r.abft_ns << ',' << r.overhead_fraction << ',' << reps << '\n';
        std::cout << "eb d=" << dim << ": overhead " << std::fixed << std::setprecision(2)
                  << 100.0 * r.overhead_fraction << "%\n";
    }

    if (!outPath.empty()) {
        std::ofstream out(outPath);
        if (!out) {
            std::cerr << "error: cannot write " << outPath << "\n";
            return 1;
        }
        out << csv.str();
        std::cout << "results written to " << outPath << "\n";
    } else {
        std::cout << csv.str();
    }
    return 0;
}

int cmd_eb_check(const std::string& tablePath, const std::string& indicesPath,
                 bool skipValidation) {
    uint64_t bags = 0, flagged = 0;
    char* rendered = nullptr;
    abftlp_status st = abftlp_eb_check_files(tablePath.c_str(), indicesPath.c_str(),
                                             skipValidation ? 1 : 0, &bags, &flagged,
                                             &rendered);
    if (st != ABFTLP_OK) return die(st, "eb-check");
    std::cout << rendered;
    abftlp_string_free(rendered);
    std::cout << flagged << "/" << bags << " bags flagged\n";
    return flagged > 0 ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ABFT for low-precision GEMM and EmbeddingBag"};
    app.require_subcommand(1);

    std::string configPath, outPath;
    auto* campaign = app.add_subcommand("campaign", "run a fault-injection campaign");
    campaign->add_option("config", configPath, "campaign config file")->required();
    campaign->add_option("--out", outPath, "CSV report path");

    uint64_t m = 0, n = 0, k = 0, d = 64, pool = 100;
    auto* analyze = app.add_subcommand("analyze", "print analytic overhead and detection predictions");
    analyze->add_option("--m", m, "GEMM rows")->required()->check(CLI::PositiveNumber);
    analyze->add_option("--n", n, "GEMM columns")->required()->check(CLI::PositiveNumber);
    analyze->add_option("--k", k, "GEMM inner dimension")->required()->check(CLI::PositiveNumber);
    analyze->add_option("--d", d, "embedding dimension")->check(CLI::PositiveNumber);
    analyze->add_option("--pool", pool, "pooling size")->check(CLI::PositiveNumber);

    std::string shapesPath = "data/shapes.txt", benchOut;
    uint32_t reps = 9;
    uint64_t ebRows = 100000;
    auto* bench = app.add_subcommand("bench", "measure ABFT overhead vs unprotected kernels");
    bench->add_option("--shapes", shapesPath, "GEMM shape file (MxNxK per line)");
    bench->add_option("--reps", reps, "timing repetitions (minimum 5)");
    bench->add_option("--out", benchOut, "CSV output path");
    bench->add_option("--eb-rows", ebRows, "embedding table rows for EB bench");

    std::string tablePath, indicesPath;
    bool skipValidation = false;
    auto* ebCheck = app.add_subcommand("eb-check", "run checked lookups over a table file");
    ebCheck->add_option("table", tablePath, "embedding table file")->required();
    ebCheck->add_option("indices", indicesPath, "bag file, one bag of indices per line")
        ->required();
    ebCheck->add_flag("--skip-validation", skipValidation,
                      "skip row-sum validation on table load");

    CLI11_PARSE(app, argc, argv);

    if (campaign->parsed()) return cmd_campaign(configPath, outPath);
    if (analyze->parsed()) return cmd_analyze(m, n, k, d, pool);
    if (bench->parsed()) return cmd_bench(shapesPath, reps, benchOut, ebRows);
    if (ebCheck->parsed()) return cmd_eb_check(tablePath, indicesPath, skipValidation);
    return 1;
}
