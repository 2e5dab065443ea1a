#include <doctest.h>

#include "fairembed/core.hpp"
#include "fairembed/svm.hpp"
#include "oracle_helpers.hpp"

using namespace fairembed;

namespace {

// n points per class around two centres in dim dimensions.
void two_blobs(Rng& rng, std::size_t n_per_class, std::size_t dim, double separation,
               std::vector<double>& rows, std::vector<int>& labels) {
    rows.clear();
    labels.clear();
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const int y = i < n_per_class ? 1 : -1;
        for (std::size_t j = 0; j < dim; ++j)
            rows.push_back(rng.gaussian() + (j == 0 ? y * separation / 2.0 : 0.0));
        labels.push_back(y);
    }
}

}  // namespace

TEST_CASE("SMO separates linearly separable blobs") {
    Rng rng(17);
    std::vector<double> rows;
    std::vector<int> labels;
    two_blobs(rng, 60, 4, 8.0, rows, labels);

    RbfSvm svm;
    SvmConfig cfg;
    cfg.seed = 3;
    svm.fit(rows, labels.size(), 4, labels, cfg);

    std::vector<double> test_rows;
    std::vector<int> test_labels;
    two_blobs(rng, 100, 4, 8.0, test_rows, test_labels);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_labels.size(); ++i)
        if (svm.predict(test_rows.data() + i * 4) == test_labels[i]) ++correct;
    CHECK(static_cast<double>(correct) / test_labels.size() > 0.95);
}

TEST_CASE("SMO handles a nonlinear ring-vs-core split") {
    // RBF kernel should separate a core cluster from a surrounding ring.
    Rng rng(21);
    std::vector<double> rows;
    std::vector<int> labels;
    for (int i = 0; i < 120; ++i) {
        const bool core = i % 2 == 0;
        const double radius = core ? 0.5 * rng.uniform() : 2.0 + 0.3 * rng.uniform();
        const double theta = 2.0 * 3.14159265358979 * rng.uniform();
        rows.push_back(radius * std::cos(theta));
        rows.push_back(radius * std::sin(theta));
        labels.push_back(core ? 1 : -1);
    }
    RbfSvm svm;
    SvmConfig cfg;
    cfg.gamma = 1.0;
    cfg.seed = 5;
    svm.fit(rows, labels.size(), 2, labels, cfg);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (svm.predict(rows.data() + i * 2) == labels[i]) ++correct;
    CHECK(static_cast<double>(correct) / labels.size() > 0.9);
}

TEST_CASE("svm fit validates inputs") {
    RbfSvm svm;
    SvmConfig cfg;
    CHECK_THROWS_AS(svm.fit({1.0, 2.0}, 1, 2, {2}, cfg), DataError);       // bad label
    CHECK_THROWS_AS(svm.fit({1.0, 2.0}, 2, 2, {1, -1}, cfg), DataError);   // size mismatch
}

TEST_CASE("reclassification of separable biased words is near perfect") {
    Rng rng(29);
    const std::size_t dim = 6;
    const std::size_t per_side = 300;
    std::vector<std::string> words;
    for (std::size_t i = 0; i < 2 * per_side; ++i) words.push_back("w" + std::to_string(i));
    Embedding e(Vocabulary(words), dim);
    std::vector<BiasedWord> biased;
    Vec v(dim);
    for (std::size_t i = 0; i < 2 * per_side; ++i) {
        const bool positive = i < per_side;
        for (std::size_t j = 0; j < dim; ++j)
            v[j] = rng.gaussian() + (j == 0 ? (positive ? 3.0 : -3.0) : 0.0);
        e.set_row(i, v);
        biased.push_back({words[i], positive ? BiasSide::Positive : BiasSide::Negative});
    }
    const auto r = svm_reclassify(e, biased, 200, 11);
    CHECK(r.train_words == 200);
    CHECK(r.test_words == 2 * per_side - 200);
    CHECK(r.accuracy > 0.95);
}

TEST_CASE("shuffled labels reclassify at chance level") {
    Rng rng(31);
    const std::size_t dim = 6;
    const std::size_t total = 5000;
    std::vector<std::string> words;
    for (std::size_t i = 0; i < total; ++i) words.push_back("w" + std::to_string(i));
    Embedding e(Vocabulary(words), dim);
    std::vector<BiasedWord> biased;
    Vec v(dim);
    std::size_t positives = 0;
    for (std::size_t i = 0; i < total; ++i) {
        for (auto& x : v) x = rng.gaussian();
        e.set_row(i, v);
        // Labels independent of geometry: balanced random assignment.
        const bool positive = positives < total / 2 && (rng.uniform() < 0.5 || i + (total / 2 - positives) >= total);
        if (positive) ++positives;
        biased.push_back({words[i], positive ? BiasSide::Positive : BiasSide::Negative});
    }
    const auto r = svm_reclassify(e, biased, 1000, 13);
    CHECK(r.test_words == 4000);
    CHECK(r.accuracy >= 0.45);
    CHECK(r.accuracy <= 0.55);
}

TEST_CASE("unbalanced pools cannot honour the 500/500 sample") {
    Rng rng(37);
    const auto e = oracle::random_embedding(rng, 20, 3);
    std::vector<BiasedWord> biased;
    for (int i = 0; i < 20; ++i)
        biased.push_back({"w" + std::to_string(i), i < 3 ? BiasSide::Positive : BiasSide::Negative});
    CHECK_THROWS_AS(svm_reclassify(e, biased, 10, 1), DataError);
}
