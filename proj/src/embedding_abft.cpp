#include "embedding_abft.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace abft::eb {

namespace {

constexpr char kMagic[4] = {'A', 'B', 'E', 'B'};
constexpr std::uint16_t kVersion = 1;

void check_bag(const QuantEmbeddingTable& table, const IndexBag& bag) {
    for (std::size_t idx : bag.indices)
        if (idx >= table.numRows())
            throw std::out_of_range("embedding_bag: index out of range");
    if (bag.weights && bag.weights->size() != bag.indices.size())
        throw std::invalid_argument("embedding_bag: weights length mismatch");
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("table file truncated");
    return v;
}

}  // namespace

std::vector<std::int32_t> precompute_row_sums(const MatI8& rows) {
    std::vector<std::int32_t> sums(rows.rows(), 0);
    for (std::size_t i = 0; i < rows.rows(); ++i)
        for (std::size_t j = 0; j < rows.cols(); ++j)
            sums[i] += static_cast<std::int32_t>(rows(i, j));
    return sums;
}

std::vector<float> embedding_bag(const QuantEmbeddingTable& table, const IndexBag& bag) {
    check_bag(table, bag);
    const std::size_t d = table.dim();
    std::vector<float> r(d, 0.0f);
    for (std::size_t t = 0; t < bag.indices.size(); ++t) {
        const std::size_t i = bag.indices[t];
        const float w = bag.weights ? (*bag.weights)[t] : 1.0f;
        const float scale = table.scales[i];
        const float bias = table.biases[i];
        for (std::size_t j = 0; j < d; ++j)
            r[j] += w * (scale * static_cast<float>(table.rows(i, j)) + bias);
    }
    return r;
}

EbCheckedResult abft_embedding_bag(const QuantEmbeddingTable& table, const IndexBag& bag) {
    EbCheckedResult res;
    res.r = embedding_bag(table, bag);

    double rSum = 0.0;
    for (float v : res.r) rSum += static_cast<double>(v);

    const double d = static_cast<double>(table.dim());
    double cSum = 0.0;
    for (std::size_t t = 0; t < bag.indices.size(); ++t) {
        const std::size_t i = bag.indices[t];
        const double w = bag.weights ? static_cast<double>((*bag.weights)[t]) : 1.0;
        cSum += w * (static_cast<double>(table.scales[i]) * table.rowSums[i] +
                     d * static_cast<double>(table.biases[i]));
    }

    res.rSum = rSum;
    res.cSum = cSum;
    res.err = std::abs(rSum - cSum) >
              kEbRelativeBound * std::max({std::abs(rSum), std::abs(cSum), 1.0});
    return res;
}

std::vector<EbCheckedResult> batch_abft_eb(const QuantEmbeddingTable& table,
                                           const std::vector<IndexBag>& bags) {
    std::vector<EbCheckedResult> out;
    out.reserve(bags.size());
    for (const IndexBag& bag : bags) out.push_back(abft_embedding_bag(table, bag));
    return out;
}

void save_table(const QuantEmbeddingTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open table file for writing: " + path);
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint64_t>(table.numRows()));
    write_pod(out, static_cast<std::uint32_t>(table.dim()));
    for (std::size_t i = 0; i < table.numRows(); ++i) {
        out.write(reinterpret_cast<const char*>(&table.rows(i, 0)),
                  static_cast<std::streamsize>(table.dim()));
        write_pod(out, table.scales[i]);
        write_pod(out, table.biases[i]);
    }
    out.write(reinterpret_cast<const char*>(table.rowSums.data()),
              static_cast<std::streamsize>(table.rowSums.size() * sizeof(std::int32_t)));
    if (!out) throw std::runtime_error("failed writing table file: " + path);
}

QuantEmbeddingTable load_table(const std::string& path, bool validateRowSums) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open table file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not an embedding table file: " + path);
    const auto version = read_pod<std::uint16_t>(in);
    if (version != kVersion) throw std::runtime_error("unsupported table file version");
    const auto r = read_pod<std::uint64_t>(in);
    const auto d = read_pod<std::uint32_t>(in);
    if (r == 0 || d == 0) throw std::runtime_error("table file has empty dimensions");

    QuantEmbeddingTable table;
    table.rows = MatI8(r, d);
    table.scales.resize(r);
    table.biases.resize(r);
    table.rowSums.resize(r);
    for (std::uint64_t i = 0; i < r; ++i) {
        in.read(reinterpret_cast<char*>(&table.rows(i, 0)), d);
        if (!in) throw std::runtime_error("table file truncated");
        table.scales[i] = read_pod<float>(in);
        table.biases[i] = read_pod<float>(in);
    }
    in.read(reinterpret_cast<char*>(table.rowSums.data()),
            static_cast<std::streamsize>(r * sizeof(std::int32_t)));
    if (!in) throw std::runtime_error("table file truncated");

    if (validateRowSums) {
        auto recomputed = precompute_row_sums(table.rows);
        if (recomputed != table.rowSums)
            throw std::runtime_error("table row-sum checksums do not match contents");
    }
    return table;
}

}  // namespace abft::eb
