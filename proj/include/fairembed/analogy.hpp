#pragma once

#include <string>
#include <vector>

#include "fairembed/embedding.hpp"
#include "fairembed/subspace.hpp"

namespace fairembed {

// 3CosAdd completion: argmax over vocab \ {a,b,c} of cos(v, b - a + c) on
// unit-normalized vectors.
std::string analogy_complete(const Embedding& e, const std::string& a, const std::string& b,
                             const std::string& c);

struct AnalogyRow {
    std::string a, b, c, d;
};

// Google analogy text format: ": <section>" headers, four words per line.
std::vector<AnalogyRow> load_analogy_section(const std::string& path, const std::string& section);

// Unique unordered word pairs occurring in a section's rows, in first-seen
// orientation and order.
std::vector<WordPair> analogy_section_pairs(const std::vector<AnalogyRow>& rows);

struct AnalogyReport {
    std::size_t total = 0;    // rows with all four words in vocabulary
    std::size_t correct = 0;
    std::size_t skipped = 0;  // rows dropped for missing words
    double error_rate = 0.0;  // percent over evaluated rows
    bool empty_evaluation = false;
};

AnalogyReport run_analogy_suite(const Embedding& e, const std::vector<AnalogyRow>& rows);

// Convenience wrapper for "the family subset of a Google-format file".
AnalogyReport family_analogy_suite(const Embedding& e, const std::string& dataset_path,
                                   const std::string& subset = "family");

}  // namespace fairembed
