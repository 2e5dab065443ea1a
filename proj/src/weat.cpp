#include "fairembed/weat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "fairembed/core.hpp"

namespace fairembed {

namespace {

using nlohmann::json;

std::vector<std::string> string_list(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) throw DataError(path + ": missing field '" + std::string(key) + "'");
    std::vector<std::string> out;
    for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
    return out;
}

std::string lowercased(const std::string& s) {
    std::string out = s;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Vocabulary lookup with a lowercase fallback for corpora preprocessed
// that way. Words missing under both forms are dropped; callers see the
// count.
std::vector<std::size_t> resolve(const Embedding& e, const std::vector<std::string>& words,
                                 std::size_t& dropped) {
    std::vector<std::size_t> out;
    for (const auto& w : words) {
        if (auto i = e.find(w))
            out.push_back(*i);
        else if (auto low = e.find(lowercased(w)))
            out.push_back(*low);
        else
            ++dropped;
    }
    return out;
}

double binomial_at_most(std::size_t n, std::size_t k) {
    // C(n, k) capped to avoid overflow; anything above 1e9 reads as "huge".
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (c > 1e9) return 1e9;
    }
    return c;
}

// Enumerates all size-k index subsets of [0, n), calling fn(mask) with a
// membership bitmask over the first n positions.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<char> mask(n, 0);
    while (true) {
        std::fill(mask.begin(), mask.end(), 0);
        for (auto i : idx) mask[i] = 1;
        fn(mask);
        // next combination
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

struct PermutationOutcome {
    double p = 1.0;
    std::size_t used = 0;
    bool exact = false;
};

// One- or two-sided permutation p-value for a difference of group means
// over pooled `values`, group sizes (n1, n - n1).
PermutationOutcome permutation_p(const std::vector<double>& values, std::size_t n1,
                                 double observed, bool two_sided, std::size_t permutations,
                                 std::uint64_t seed, bool force_monte_carlo) {
    const std::size_t n = values.size();
    const std::size_t n2 = n - n1;
    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    const double eps = 1e-12 * (1.0 + std::abs(observed));

    auto stat_from_sum1 = [&](double sum1) {
        const double mean1 = sum1 / static_cast<double>(n1);
        const double mean2 = (total - sum1) / static_cast<double>(n2);
        return mean1 - mean2;
    };

    PermutationOutcome out;
    if (!force_monte_carlo && binomial_at_most(n, n1) <= 20000.0) {
        std::size_t hits = 0, count = 0;
        for_each_combination(n, n1, [&](const std::vector<char>& mask) {
            double sum1 = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (mask[i]) sum1 += values[i];
            const double stat = stat_from_sum1(sum1);
            const bool hit = two_sided ? std::abs(stat) >= std::abs(observed) - eps
                                       : stat >= observed - eps;
            if (hit) ++hits;
            ++count;
        });
        out.p = static_cast<double>(hits) / static_cast<double>(count);
        out.used = count;
        out.exact = true;
        return out;
    }

    Rng rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < permutations; ++r) {
        // Partial Fisher-Yates: the first n1 entries form group 1.
        for (std::size_t i = 0; i < n1; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(n - i));
            std::swap(idx[i], idx[j]);
        }
        double sum1 = 0.0;
        for (std::size_t i = 0; i < n1; ++i) sum1 += values[idx[i]];
        const double stat = stat_from_sum1(sum1);
        const bool hit = two_sided ? std::abs(stat) >= std::abs(observed) - eps
                                   : stat >= observed - eps;
        if (hit) ++hits;
    }
    out.p = static_cast<double>(hits) / static_cast<double>(permutations);
    out.used = permutations;
    out.exact = false;
    return out;
}

}  // namespace

WeatTest load_weat_test(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open WEAT test file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw DataError("bad WEAT JSON in " + path + ": " + ex.what());
    }
    WeatTest t;
    t.name = j.value("name", path);
    t.targets_x = string_list(j, "X", path);
    t.targets_y = string_list(j, "Y", path);
    t.attributes_a = string_list(j, "A", path);
    t.attributes_b = string_list(j, "B", path);
    return t;
}

double weat_association(const std::string& w, const std::vector<std::string>& attributes_a,
                        const std::vector<std::string>& attributes_b, const Embedding& e) {
    if (attributes_a.empty() || attributes_b.empty())
        throw DataError("weat_association: empty attribute list");
    const auto wv = e.vector_of(w);
    double mean_a = 0.0, mean_b = 0.0;
    for (const auto& a : attributes_a) mean_a += cosine(wv, e.vector_of(a));
    for (const auto& b : attributes_b) mean_b += cosine(wv, e.vector_of(b));
    return mean_a / attributes_a.size() - mean_b / attributes_b.size();
}

WeatResult weat_run(const WeatTest& test, const Embedding& e, std::size_t permutations,
                    std::uint64_t seed, bool force_monte_carlo) {
    WeatResult result;
    const auto xi = resolve(e, test.targets_x, result.dropped_words);
    const auto yi = resolve(e, test.targets_y, result.dropped_words);
    std::vector<std::string> attr_a, attr_b;
    for (auto i : resolve(e, test.attributes_a, result.dropped_words))
        attr_a.push_back(e.vocab().word(i));
    for (auto i : resolve(e, test.attributes_b, result.dropped_words))
        attr_b.push_back(e.vocab().word(i));
    if (xi.empty() || yi.empty()) throw DataError("WEAT: no resolvable target words");
    if (attr_a.empty() || attr_b.empty()) throw DataError("WEAT: no resolvable attribute words");

    // Per-word association scores; partitions only re-group them.
    std::vector<double> scores;
    scores.reserve(xi.size() + yi.size());
    for (auto i : xi) scores.push_back(weat_association(e.vocab().word(i), attr_a, attr_b, e));
    for (auto i : yi) scores.push_back(weat_association(e.vocab().word(i), attr_a, attr_b, e));

    const std::size_t nx = xi.size();
    const std::size_t n = scores.size();
    double mean_x = 0.0, mean_y = 0.0, mean_all = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_all += scores[i];
        (i < nx ? mean_x : mean_y) += scores[i];
    }
    mean_x /= static_cast<double>(nx);
    mean_y /= static_cast<double>(n - nx);
    mean_all /= static_cast<double>(n);
    double var = 0.0;
    for (double s : scores) var += (s - mean_all) * (s - mean_all);
    if (n < 3 || var == 0.0) throw NumericError("WEAT: zero variance of association scores");
    const double sd = std::sqrt(var / static_cast<double>(n - 1));

    result.effect_size = (mean_x - mean_y) / sd;
    const auto outcome = permutation_p(scores, nx, mean_x - mean_y, /*two_sided=*/false,
                                       permutations, seed, force_monte_carlo);
    result.p_one_sided = outcome.p;
    result.permutations_used = outcome.used;
    result.exact = outcome.exact;
    return result;
}

double permutation_compare(const std::vector<double>& samples1,
                           const std::vector<double>& samples2, std::size_t permutations,
                           std::uint64_t seed, bool force_monte_carlo) {
    if (samples1.empty() || samples2.empty())
        throw DataError("permutation_compare: empty sample set");
    std::vector<double> pooled = samples1;
    pooled.insert(pooled.end(), samples2.begin(), samples2.end());
    const double mean1 =
        std::accumulate(samples1.begin(), samples1.end(), 0.0) / samples1.size();
    const double mean2 =
        std::accumulate(samples2.begin(), samples2.end(), 0.0) / samples2.size();
    return permutation_p(pooled, samples1.size(), mean1 - mean2, /*two_sided=*/true, permutations,
                         seed, force_monte_carlo)
        .p;
}

}  // namespace fairembed
