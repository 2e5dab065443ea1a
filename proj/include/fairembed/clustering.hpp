#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairembed/embedding.hpp"
#include "fairembed/subspace.hpp"

namespace fairembed {

struct BiasDirection {
    Vec direction;  // unit vector
};

// Top principal direction of the pair covariance (the subspace module's
// computation with k = 1), sign-fixed.
BiasDirection bias_direction(const Embedding& e, const std::vector<WordPair>& pairs);

enum class BiasSide : std::uint8_t { Positive, Negative };  // sign of the b_test cosine

struct BiasedWord {
    std::string word;
    BiasSide side;
};

// Top n words by cosine with +b and with -b in the given (unmitigated)
// embedding. Requires vocab >= 2n so the sides cannot overlap.
std::vector<BiasedWord> select_biased_words(const Embedding& e, const BiasDirection& b,
                                            std::size_t n_per_side = 500);

struct TsneResult {
    std::vector<double> points;      // m x 2, row-major
    std::vector<double> kl_history;  // KL divergence per iteration (true P)
    std::size_t exaggeration_end = 0;
};

// Exact O(m^2) tSNE with per-point sigma matched to the perplexity by
// binary search, early exaggeration, and momentum gradient descent.
// Deterministic for a fixed seed.
TsneResult tsne_2d(const std::vector<double>& data, std::size_t m, std::size_t d,
                   double perplexity = 30.0, std::size_t iterations = 1000,
                   std::uint64_t seed = 0);

struct KmeansResult {
    std::vector<std::size_t> labels;
    double inertia = 0.0;
    std::vector<double> inertia_history;  // per Lloyd iteration of the best restart
};

// k-means++ initialization, Lloyd iterations to convergence, best of
// `restarts` by inertia.
KmeansResult kmeans(const std::vector<double>& points, std::size_t m, std::size_t dim,
                    std::size_t k = 2, std::uint64_t seed = 0, std::size_t restarts = 10);

struct ClusterReport {
    double homogeneity = 0.0;
    double completeness = 0.0;
    double v_measure = 0.0;
    std::size_t sample_size = 0;
    std::uint64_t seed = 0;
};

ClusterReport v_measure(const std::vector<std::size_t>& predicted,
                        const std::vector<std::size_t>& gold);

struct ClusterEvalConfig {
    std::size_t sample_size = 200;
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    double perplexity = 30.0;
    std::size_t tsne_iterations = 1000;
    std::size_t kmeans_restarts = 10;
};

struct ClusterEvalResult {
    double mean_v = 0.0;
    double std_v = 0.0;
    double mean_homogeneity = 0.0;
    double mean_completeness = 0.0;
    std::size_t samples = 0;
    std::size_t skipped_words = 0;  // biased words missing from the embedding
    std::vector<double> sample_v;   // per-sample V-measures
};

// Repeated sample -> tSNE -> k-means(2) -> V-measure against the bias-side
// gold labels; deterministic via per-sample derived seeds.
ClusterEvalResult cluster_purity_eval(const Embedding& e, const std::vector<BiasedWord>& biased,
                                      const ClusterEvalConfig& cfg);

}  // namespace fairembed
