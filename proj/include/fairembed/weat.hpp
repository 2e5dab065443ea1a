#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairembed/embedding.hpp"

namespace fairembed {

struct WeatTest {
    std::string name;
    std::vector<std::string> targets_x;
    std::vector<std::string> targets_y;
    std::vector<std::string> attributes_a;
    std::vector<std::string> attributes_b;
};

// JSON file {"name":..., "X":[...], "Y":[...], "A":[...], "B":[...]}.
WeatTest load_weat_test(const std::string& path);

struct WeatResult {
    double effect_size = 0.0;  // Cohen's d over association scores
    double p_one_sided = 1.0;
    std::size_t permutations_used = 0;
    bool exact = false;  // true when every equal-size re-partition was enumerated
    std::size_t dropped_words = 0;  // out-of-vocabulary words removed from the test
};

// mean_a cos(w, a) - mean_b cos(w, b).
double weat_association(const std::string& w, const std::vector<std::string>& attributes_a,
                        const std::vector<std::string>& attributes_b, const Embedding& e);

// Effect size and one-sided permutation p-value. Partitions are enumerated
// exactly when C(|X union Y|, |X|) <= 20000 (unless forced), otherwise
// Monte Carlo with `permutations` draws.
WeatResult weat_run(const WeatTest& test, const Embedding& e, std::size_t permutations = 10000,
                    std::uint64_t seed = 0, bool force_monte_carlo = false);

// Two-sided permutation test on the difference of sample means. Exact
// enumeration under the same feasibility rule.
double permutation_compare(const std::vector<double>& samples1,
                           const std::vector<double>& samples2, std::size_t permutations = 10000,
                           std::uint64_t seed = 0, bool force_monte_carlo = false);

}  // namespace fairembed
