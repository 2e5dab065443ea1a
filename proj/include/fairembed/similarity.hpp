#pragma once

#include <string>
#include <vector>

#include "fairembed/embedding.hpp"

namespace fairembed {

struct SpearmanResult {
    double r_s = 0.0;
    double p_two_sided = 1.0;  // t-approximation
    std::size_t pairs_evaluated = 0;
    std::size_t pairs_skipped = 0;
};

// Average ranks for tied values.
std::vector<double> average_ranks(const std::vector<double>& values);

// Spearman rank correlation with tie handling; requires n >= 3 and
// non-constant inputs.
SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y);

// Judgement file rows "word1 word2 score" (whitespace or comma separated,
// '#' comments allowed). Pairs with out-of-vocabulary words are skipped
// and counted.
SpearmanResult similarity_eval(const Embedding& e, const std::string& judgements_path);

// Regularized incomplete beta function (used for the Student-t tail).
double incomplete_beta(double a, double b, double x);

}  // namespace fairembed
