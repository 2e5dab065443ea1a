#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairembed/linalg.hpp"

namespace fairembed {

// Ordered set of unique tokens with O(1) word -> row lookup.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> words);

    std::size_t size() const { return words_.size(); }
    const std::string& word(std::size_t i) const { return words_[i]; }
    const std::vector<std::string>& words() const { return words_; }
    bool contains(const std::string& w) const { return index_.count(w) != 0; }
    std::optional<std::size_t> find(const std::string& w) const;
    // Appends a new word; throws DataError on duplicates.
    std::size_t add(const std::string& w);

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Dense |vocab| x dim matrix, row per word. Immutable once built except
// through operations that take it by non-const reference.
class Embedding {
public:
    Embedding() = default;
    Embedding(Vocabulary vocab, std::size_t dim);

    const Vocabulary& vocab() const { return vocab_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return vocab_.size(); }

    std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    // Row by word; throws DataError if absent.
    std::span<const double> vector_of(const std::string& w) const;
    std::optional<std::size_t> find(const std::string& w) const { return vocab_.find(w); }

    void set_row(std::size_t i, std::span<const double> v);
    // Scales every row to unit norm; rows with zero norm throw NumericError.
    void normalize_rows();

    // Cached unit rows for cosine-heavy evaluation loops. Invalidated by
    // any mutation through ensure/set_row.
    const std::vector<double>& unit_rows() const;

private:
    Vocabulary vocab_;
    std::size_t dim_ = 0;
    std::vector<double> data_;
    mutable std::vector<double> unit_cache_;
    mutable bool unit_cache_valid_ = false;
};

// u . v / (|u| |v|). Throws NumericError on zero-norm input, DataError on
// dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

struct NeighborList {
    std::string query;
    std::vector<std::pair<std::string, double>> entries;  // cosine descending
};

// Top-k neighbours by cosine, excluding the query word and `exclude`.
// Ties break toward smaller vocabulary index.
NeighborList nearest_neighbors(const Embedding& e, const std::string& query, std::size_t k,
                               const std::vector<std::string>& exclude = {});
// Same, for a raw direction vector (no query word excluded).
NeighborList nearest_neighbors(const Embedding& e, std::span<const double> query, std::size_t k,
                               const std::vector<std::string>& exclude = {});

// word2vec text format: "<count> <dim>" header then "<word> <components>".
// Floats are written as shortest round-trip decimals so save/load is exact.
Embedding load_embedding(std::istream& in);
Embedding load_embedding_file(const std::string& path);
void save_embedding(const Embedding& e, std::ostream& out);
void save_embedding_file(const Embedding& e, const std::string& path);

std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace fairembed
