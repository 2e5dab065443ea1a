#pragma once

#include <cstdint>
#include <vector>

#include "fairembed/clustering.hpp"
#include "fairembed/embedding.hpp"

namespace fairembed {

struct SvmConfig {
    double c = 1.0;
    double gamma = 0.0;  // 0 = 1 / (dim * mean component variance)
    double tolerance = 1e-3;
    std::size_t max_passes = 10000;
    std::uint64_t seed = 0;
};

// RBF-kernel SVM trained with sequential minimal optimization.
class RbfSvm {
public:
    // rows: n x dim feature matrix, labels in {-1, +1}.
    void fit(const std::vector<double>& rows, std::size_t n, std::size_t dim,
             const std::vector<int>& labels, const SvmConfig& cfg);
    double decision(const double* x) const;
    int predict(const double* x) const { return decision(x) >= 0.0 ? 1 : -1; }

private:
    std::vector<double> support_;  // support vectors, row-major
    std::vector<double> alpha_y_;  // alpha_i * y_i per support vector
    std::size_t dim_ = 0;
    double bias_ = 0.0;
    double gamma_ = 0.0;
};

struct ReclassifyResult {
    double accuracy = 0.0;
    std::size_t train_words = 0;
    std::size_t test_words = 0;
    std::size_t skipped_words = 0;
};

// Trains on a balanced random sample (train_n/2 per side) of the biased
// words resolvable in `e` and reports accuracy on the remainder.
ReclassifyResult svm_reclassify(const Embedding& e, const std::vector<BiasedWord>& biased,
                                std::size_t train_n = 1000, std::uint64_t seed = 0,
                                const SvmConfig& cfg = {});

}  // namespace fairembed
