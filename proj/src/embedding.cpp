#include "fairembed/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fairembed/core.hpp"

namespace fairembed {

Vocabulary::Vocabulary(std::vector<std::string> words) {
    words_.reserve(words.size());
    for (auto& w : words) add(w);
}

std::optional<std::size_t> Vocabulary::find(const std::string& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Vocabulary::add(const std::string& w) {
    auto [it, inserted] = index_.emplace(w, words_.size());
    if (!inserted) throw DataError("duplicate word in vocabulary: " + w);
    words_.push_back(w);
    return it->second;
}

Embedding::Embedding(Vocabulary vocab, std::size_t dim)
    : vocab_(std::move(vocab)), dim_(dim), data_(vocab_.size() * dim, 0.0) {
    if (dim == 0) throw ConfigError("embedding dimension must be at least 1");
}

std::span<const double> Embedding::vector_of(const std::string& w) const {
    auto i = vocab_.find(w);
    if (!i) throw DataError("word not in vocabulary: " + w);
    return row(*i);
}

void Embedding::set_row(std::size_t i, std::span<const double> v) {
    if (v.size() != dim_) throw DataError("row dimension mismatch");
    std::copy(v.begin(), v.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
    unit_cache_valid_ = false;
}

void Embedding::normalize_rows() {
    for (std::size_t i = 0; i < size(); ++i) {
        auto r = row(i);
        const double n = norm(r);
        if (n == 0.0) throw NumericError("zero-norm row for word: " + vocab_.word(i));
        for (auto& x : r) x /= n;
    }
    unit_cache_valid_ = false;
}

const std::vector<double>& Embedding::unit_rows() const {
    if (!unit_cache_valid_) {
        unit_cache_.assign(data_.begin(), data_.end());
        for (std::size_t i = 0; i < size(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) s += unit_cache_[i * dim_ + j] * unit_cache_[i * dim_ + j];
            const double n = std::sqrt(s);
            if (n == 0.0) throw NumericError("zero-norm row for word: " + vocab_.word(i));
            for (std::size_t j = 0; j < dim_; ++j) unit_cache_[i * dim_ + j] /= n;
        }
        unit_cache_valid_ = true;
    }
    return unit_cache_;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw DataError("cosine: dimension mismatch");
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) throw NumericError("cosine: zero-norm input");
    return dot(u, v) / (nu * nv);
}

namespace {

NeighborList rank_neighbors(const Embedding& e, std::span<const double> query,
                            std::optional<std::size_t> query_index, std::size_t k,
                            const std::vector<std::string>& exclude, std::string query_name) {
    if (query.size() != e.dim()) throw DataError("nearest_neighbors: dimension mismatch");
    const double qn = norm(query);
    if (qn == 0.0) throw NumericError("nearest_neighbors: zero-norm query");

    std::vector<char> excluded(e.size(), 0);
    if (query_index) excluded[*query_index] = 1;
    for (const auto& w : exclude)
        if (auto i = e.find(w)) excluded[*i] = 1;

    const auto& unit = e.unit_rows();
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (excluded[i]) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < e.dim(); ++j) s += unit[i * e.dim() + j] * query[j];
        scored.emplace_back(s / qn, i);
    }
    if (k > scored.size()) throw DataError("nearest_neighbors: k exceeds candidate count");

    // Descending score, ties toward smaller vocabulary index.
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                      });

    NeighborList out;
    out.query = std::move(query_name);
    out.entries.reserve(k);
    for (std::size_t r = 0; r < k; ++r)
        out.entries.emplace_back(e.vocab().word(scored[r].second), scored[r].first);
    return out;
}

}  // namespace

NeighborList nearest_neighbors(const Embedding& e, const std::string& query, std::size_t k,
                               const std::vector<std::string>& exclude) {
    auto i = e.find(query);
    if (!i) throw DataError("nearest_neighbors: unknown query word: " + query);
    return rank_neighbors(e, e.row(*i), i, k, exclude, query);
}

NeighborList nearest_neighbors(const Embedding& e, std::span<const double> query, std::size_t k,
                               const std::vector<std::string>& exclude) {
    return rank_neighbors(e, query, std::nullopt, k, exclude, "<vector>");
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw NumericError("float formatting failed");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw DataError("bad float: '" + std::string(text) + "'");
    return v;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

Embedding load_embedding(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("embedding stream empty");
    const auto header = split_ws(line);
    if (header.size() != 2) throw DataError("malformed embedding header: '" + line + "'");
    std::size_t count = 0, dim = 0;
    auto parse_count = [](std::string_view t, std::size_t& out) {
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
        if (ec != std::errc() || ptr != t.data() + t.size())
            throw DataError("malformed embedding header field: '" + std::string(t) + "'");
    };
    parse_count(header[0], count);
    parse_count(header[1], dim);
    if (dim == 0) throw DataError("embedding header: dim must be at least 1");

    Vocabulary vocab;
    std::vector<double> rows;
    rows.reserve(count * dim);
    for (std::size_t r = 0; r < count; ++r) {
        if (!std::getline(in, line)) throw DataError("embedding truncated: expected " +
                                                     std::to_string(count) + " rows");
        const auto fields = split_ws(line);
        if (fields.size() != dim + 1)
            throw DataError("embedding row arity mismatch for '" +
                            (fields.empty() ? std::string("<empty>") : std::string(fields[0])) + "'");
        vocab.add(std::string(fields[0]));
        for (std::size_t j = 0; j < dim; ++j) {
            const double v = parse_double(fields[j + 1]);
            if (!std::isfinite(v))
                throw DataError("non-finite component for '" + std::string(fields[0]) + "'");
            rows.push_back(v);
        }
    }
    Embedding e(std::move(vocab), dim);
    for (std::size_t r = 0; r < count; ++r)
        e.set_row(r, std::span<const double>(rows.data() + r * dim, dim));
    return e;
}

Embedding load_embedding_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embedding file: " + path);
    return load_embedding(in);
}

void save_embedding(const Embedding& e, std::ostream& out) {
    out << e.size() << ' ' << e.dim() << '\n';
    for (std::size_t i = 0; i < e.size(); ++i) {
        out << e.vocab().word(i);
        for (double v : e.row(i)) out << ' ' << format_double(v);
        out << '\n';
    }
}

void save_embedding_file(const Embedding& e, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write embedding file: " + path);
    save_embedding(e, out);
}

}  // namespace fairembed
