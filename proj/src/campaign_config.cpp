#include <cctype>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "fault_lab.hpp"

namespace abft::lab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        std::uint64_t r = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw std::invalid_argument("campaign config: bad integer for '" + key + "': " + v);
    }
}

GemmShape parse_shape(const std::string& s) {
    std::istringstream in(s);
    GemmShape shape;
    char x1, x2;
    if (!(in >> shape.m >> x1 >> shape.n >> x2 >> shape.k) || x1 != 'x' || x2 != 'x' ||
        shape.m == 0 || shape.n == 0 || shape.k == 0)
        throw std::invalid_argument("campaign config: bad shape '" + s + "' (want MxNxK)");
    return shape;
}

FaultTarget parse_target(const std::string& v) {
    if (v == "weight_b") return FaultTarget::weight_B;
    if (v == "intermediate_c") return FaultTarget::intermediate_C;
    if (v == "eb_table") return FaultTarget::eb_table;
    if (v == "none") return FaultTarget::none;
    throw std::invalid_argument("campaign config: unknown fault target '" + v + "'");
}

std::string csv_row(const CampaignReport& rep, const std::string& label, std::uint64_t trials,
                    std::uint64_t detected, std::uint64_t falsePositives) {
    std::ostringstream out;
    const double rate = trials ? static_cast<double>(detected) / trials : 0.0;
    WilsonInterval ci = wilson_interval(detected, trials);
    out << rep.target << ',' << rep.model << ',' << rep.bitRange << ',' << label << ','
        << trials << ',' << detected << ',' << (trials - detected) << ',' << falsePositives
        << ',' << std::setprecision(10) << rate << ',' << ci.low << ',' << ci.high << '\n';
    return out.str();
}

}  // namespace

CampaignConfig parse_campaign_config(const std::string& text) {
    CampaignConfig cfg;
    std::string section;
    std::string workloadKind;
    std::map<std::string, std::string> values;  // "section.key"

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("campaign config: malformed section '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("campaign config: expected key=value, got '" + line + "'");
        values[(section.empty() ? "" : section + ".") + trim(line.substr(0, eq))] =
            trim(line.substr(eq + 1));
    }

    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        std::string v = it->second;
        values.erase(it);
        return v;
    };
    auto require = [&](const std::string& key) {
        auto v = take(key);
        if (!v) throw std::invalid_argument("campaign config: missing '" + key + "'");
        return *v;
    };

    if (auto t = take("threads")) cfg.threads = parse_u64("threads", *t);

    workloadKind = require("workload.kind");
    if (workloadKind == "gemm") {
        GemmWorkload wl;
        wl.trialsPerShape = parse_u64("trials_per_shape", require("workload.trials_per_shape"));
        std::istringstream shapes(require("workload.shapes"));
        std::string item;
        while (std::getline(shapes, item, ',')) {
            item = trim(item);
            if (!item.empty()) wl.shapes.push_back(parse_shape(item));
        }
        if (wl.shapes.empty())
            throw std::invalid_argument("campaign config: workload.shapes is empty");
        cfg.gemm = wl;
    } else if (workloadKind == "eb") {
        EbWorkload wl;
        wl.tableRows = parse_u64("table_rows", require("workload.table_rows"));
        wl.tableDim = parse_u64("table_dim", require("workload.table_dim"));
        wl.pooling = parse_u64("pooling", require("workload.pooling"));
        wl.batch = parse_u64("batch", require("workload.batch"));
        wl.trials = parse_u64("trials", require("workload.trials"));
        cfg.eb = wl;
    } else {
        throw std::invalid_argument("campaign config: unknown workload.kind '" + workloadKind +
                                    "'");
    }

    cfg.fault.target = parse_target(require("fault.target"));
    if (auto m = take("fault.model")) {
        if (*m == "single_bit_flip")
            cfg.fault.model = model::FaultModel::single_bit_flip;
        else if (*m == "random_value")
            cfg.fault.model = model::FaultModel::random_value;
        else
            throw std::invalid_argument("campaign config: unknown fault model '" + *m + "'");
    }
    if (auto r = take("fault.bit_range")) {
        if (*r == "all")
            cfg.fault.bitRange = BitRange::all;
        else if (*r == "high4")
            cfg.fault.bitRange = BitRange::high4;
        else if (*r == "low4")
            cfg.fault.bitRange = BitRange::low4;
        else
            throw std::invalid_argument("campaign config: unknown bit_range '" + *r + "'");
    }
    if (auto s = take("fault.seed")) cfg.fault.seed = parse_u64("seed", *s);

    if (!values.empty())
        throw std::invalid_argument("campaign config: unknown key '" + values.begin()->first +
                                    "'");
    return cfg;
}

CampaignConfig load_campaign_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_campaign_config(buf.str());
}

std::string report_to_csv(const CampaignReport& rep) {
    std::string out =
        "target,model,bit_range,shape_or_dims,trials,detected,not_detected,"
        "false_positives,detection_rate,ci_low,ci_high\n";
    for (const ShapeStats& st : rep.perShape)
        out += csv_row(rep, st.label, st.trials, st.detected, st.falsePositives);
    if (rep.perShape.size() > 1)
        out += csv_row(rep, "total", rep.trials, rep.detected, rep.falsePositives);
    return out;
}

std::string report_to_table(const CampaignReport& rep) {
    std::ostringstream out;
    out << "campaign: target=" << rep.target << " model=" << rep.model
        << " bit_range=" << rep.bitRange << "\n";
    if (!rep.notes.empty()) out << "note: " << rep.notes << "\n";
    out << std::left << std::setw(24) << "shape_or_dims" << std::right << std::setw(8)
        << "trials" << std::setw(10) << "detected" << std::setw(8) << "fp" << std::setw(10)
        << "rate" << std::setw(18) << "wilson95\n";
    auto row = [&](const std::string& label, std::uint64_t trials, std::uint64_t detected,
                   std::uint64_t fp) {
        const double rate = trials ? static_cast<double>(detected) / trials : 0.0;
        WilsonInterval ci = wilson_interval(detected, trials);
        out << std::left << std::setw(24) << label << std::right << std::setw(8) << trials
            << std::setw(10) << detected << std::setw(8) << fp << std::setw(10) << std::fixed
            << std::setprecision(4) << rate << "   [" << ci.low << ", " << ci.high << "]\n";
    };
    for (const ShapeStats& st : rep.perShape)
        row(st.label, st.trials, st.detected, st.falsePositives);
    if (rep.perShape.size() > 1) row("total", rep.trials, rep.detected, rep.falsePositives);
    return out.str();
}

}  // namespace abft::lab
