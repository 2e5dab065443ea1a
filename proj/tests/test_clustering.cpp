#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fairembed/clustering.hpp"
#include "fairembed/core.hpp"
#include "oracle_helpers.hpp"

using namespace fairembed;

namespace {

// Two Gaussian blobs in `dim` dimensions, first half label 0.
std::vector<double> gaussian_blobs(Rng& rng, std::size_t per_blob, std::size_t dim,
                                   double separation) {
    std::vector<double> data;
    data.reserve(2 * per_blob * dim);
    for (std::size_t i = 0; i < 2 * per_blob; ++i) {
        const double offset = i < per_blob ? separation / 2.0 : -separation / 2.0;
        for (std::size_t j = 0; j < dim; ++j)
            data.push_back(rng.gaussian() + (j == 0 ? offset : 0.0));
    }
    return data;
}

double cluster_purity(const std::vector<std::size_t>& labels, std::size_t per_blob) {
    // Fraction of points on the majority side of each cluster.
    std::size_t agree = 0;
    for (std::size_t flip = 0; flip < 2; ++flip) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const std::size_t expected = (i < per_blob) == (flip == 0) ? 0 : 1;
            if (labels[i] == expected) ++count;
        }
        agree = std::max(agree, count);
    }
    return static_cast<double>(agree) / static_cast<double>(labels.size());
}

}  // namespace

TEST_CASE("v_measure closed forms") {
    SUBCASE("perfect labelings score 1, relabeling included") {
        CHECK(v_measure({0, 0, 1, 1}, {0, 0, 1, 1}).v_measure == doctest::Approx(1.0));
        CHECK(v_measure({5, 5, 2, 2}, {0, 0, 1, 1}).v_measure == doctest::Approx(1.0));
    }
    SUBCASE("single predicted cluster over balanced classes scores 0") {
        const auto r = v_measure({0, 0, 0, 0}, {0, 0, 1, 1});
        CHECK(r.homogeneity == doctest::Approx(0.0));
        CHECK(r.completeness == doctest::Approx(1.0));
        CHECK(r.v_measure == doctest::Approx(0.0));
    }
    SUBCASE("hand-computed mixed labeling") {
        // g = [0,0,1,1], p = [0,1,1,1]: V = 0.3437 by direct entropy arithmetic.
        const auto r = v_measure({0, 1, 1, 1}, {0, 0, 1, 1});
        CHECK(r.v_measure == doctest::Approx(0.3437110186).epsilon(1e-6));
    }
    SUBCASE("length mismatch rejected") {
        CHECK_THROWS_AS(v_measure({0, 1}, {0}), DataError);
    }
}

TEST_CASE("v_measure matches the entropy oracle on random labelings") {
    Rng rng(83);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(40);
        std::vector<std::size_t> pred(n), gold(n);
        const std::size_t kp = 1 + rng.uniform_int(4), kg = 1 + rng.uniform_int(4);
        for (auto& v : pred) v = rng.uniform_int(kp);
        for (auto& v : gold) v = rng.uniform_int(kg);
        const auto got = v_measure(pred, gold);
        const auto expect = oracle::v_measure_oracle(pred, gold);
        CHECK(got.homogeneity == doctest::Approx(expect.homogeneity).epsilon(1e-10));
        CHECK(got.completeness == doctest::Approx(expect.completeness).epsilon(1e-10));
        CHECK(got.v_measure == doctest::Approx(expect.v).epsilon(1e-10));
        CHECK(got.v_measure >= 0.0);
        CHECK(got.v_measure <= 1.0 + 1e-12);

        // h/c swap symmetry under exchanging the two labelings.
        const auto swapped = v_measure(gold, pred);
        CHECK(swapped.homogeneity == doctest::Approx(got.completeness).epsilon(1e-10));
        CHECK(swapped.completeness == doctest::Approx(got.homogeneity).epsilon(1e-10));
    }
}

TEST_CASE("kmeans clusters separated clouds perfectly") {
    Rng rng(89);
    const std::size_t per = 40;
    std::vector<double> points;
    for (std::size_t i = 0; i < 2 * per; ++i) {
        const double cx = i < per ? 0.0 : 10.0;
        points.push_back(cx + 0.3 * rng.gaussian());
        points.push_back(cx + 0.3 * rng.gaussian());
    }
    const auto r = kmeans(points, 2 * per, 2, 2, 7, 10);
    CHECK(cluster_purity(r.labels, per) == doctest::Approx(1.0));
}

TEST_CASE("kmeans with k = m gives zero inertia") {
    std::vector<double> points = {0, 0, 1, 0, 0, 1, 5, 5};
    const auto r = kmeans(points, 4, 2, 4, 3, 5);
    CHECK(r.inertia == doctest::Approx(0.0));
    std::vector<std::size_t> sorted = r.labels;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("kmeans inertia never increases across Lloyd iterations") {
    Rng rng(97);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> points;
        const std::size_t m = 60;
        for (std::size_t i = 0; i < 2 * m; ++i) points.push_back(rng.gaussian());
        const auto r = kmeans(points, m, 2, 3, trial, 4);
        for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
            CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] + 1e-9);
    }
}

TEST_CASE("best-of-restarts inertia is no worse than any single restart") {
    Rng rng(101);
    std::vector<double> points;
    const std::size_t m = 80;
    for (std::size_t i = 0; i < 2 * m; ++i) points.push_back(rng.gaussian() * 3.0);
    const auto best = kmeans(points, m, 2, 4, 42, 10);
    for (std::size_t restart = 0; restart < 10; ++restart) {
        // Restart r of the multi-restart run uses the same derived seed
        // stream as a single-restart run with that seed cannot replicate
        // directly, so compare against fresh single restarts instead.
        const auto single = kmeans(points, m, 2, 4, 1000 + restart, 1);
        CHECK(best.inertia <= single.inertia + 1e-9);
    }
}

TEST_CASE("kmeans argument validation") {
    CHECK_THROWS_AS(kmeans({1.0, 2.0}, 1, 2, 2, 1, 1), DataError);
    CHECK_THROWS_AS(kmeans({1.0, 2.0, 3.0}, 1, 2, 1, 1, 1), DataError);
}

TEST_CASE("tsne separates two well-separated blobs") {
    Rng rng(103);
    const std::size_t per = 60;
    const auto data = gaussian_blobs(rng, per, 10, 14.0);
    const auto result = tsne_2d(data, 2 * per, 10, 20.0, 600, 5);
    REQUIRE(result.points.size() == 4 * per);

    const auto clusters = kmeans(result.points, 2 * per, 2, 2, 9, 10);
    CHECK(cluster_purity(clusters.labels, per) == doctest::Approx(1.0));
}

TEST_CASE("tsne KL divergence is non-increasing after early exaggeration") {
    Rng rng(107);
    const std::size_t per = 45;
    const auto data = gaussian_blobs(rng, per, 8, 10.0);
    const auto result = tsne_2d(data, 2 * per, 8, 15.0, 700, 11);
    REQUIRE(result.kl_history.size() == 700);
    for (std::size_t i = result.exaggeration_end + 1; i < result.kl_history.size(); ++i)
        CHECK(result.kl_history[i] <= result.kl_history[i - 1] + 1e-7);
}

TEST_CASE("duplicated points stay mutual nearest neighbours in the projection") {
    Rng rng(109);
    const std::size_t m = 90;
    const std::size_t dim = 6;
    std::vector<double> data;
    for (std::size_t i = 0; i < (m - 2) * dim; ++i) data.push_back(rng.gaussian() * 2.0);
    // Append one duplicated pair.
    std::vector<double> dup(dim);
    for (auto& x : dup) x = rng.gaussian() * 2.0;
    data.insert(data.end(), dup.begin(), dup.end());
    data.insert(data.end(), dup.begin(), dup.end());

    const auto result = tsne_2d(data, m, dim, 12.0, 500, 13);
    auto dist2 = [&](std::size_t i, std::size_t j) {
        const double dx = result.points[i * 2] - result.points[j * 2];
        const double dy = result.points[i * 2 + 1] - result.points[j * 2 + 1];
        return dx * dx + dy * dy;
    };
    const std::size_t a = m - 2, b = m - 1;
    for (std::size_t j = 0; j < m; ++j) {
        if (j != a && j != b) {
            CHECK(dist2(a, b) <= dist2(a, j));
            CHECK(dist2(b, a) <= dist2(b, j));
        }
    }
}

TEST_CASE("tsne validates the perplexity precondition") {
    std::vector<double> tiny(10 * 3, 0.5);
    CHECK_THROWS_AS(tsne_2d(tiny, 10, 3, 30.0, 100, 1), DataError);
}

TEST_CASE("bias_direction is the top covariance eigenvector, sign fixed") {
    Rng rng(113);
    const auto e = oracle::random_embedding(rng, 12, 5);
    const std::vector<WordPair> pairs = {{"w0", "w1"}, {"w2", "w3"}, {"w4", "w5"}};
    const auto b = bias_direction(e, pairs);
    CHECK(norm(b.direction) == doctest::Approx(1.0).epsilon(1e-10));
    const auto sub = compute_bias_subspace(e, DefinitionalPairs{pairs}, FixedK{1});
    CHECK(norm(fairembed::sub(b.direction, sub.basis[0])) < 1e-10);
}

TEST_CASE("select_biased_words takes the signed extremes") {
    Embedding e(Vocabulary({"pos", "neg", "mid"}), 2);
    e.set_row(0, std::vector<double>{0.9, 0.1});
    e.set_row(1, std::vector<double>{-0.8, 0.2});
    e.set_row(2, std::vector<double>{0.0, 1.0});
    BiasDirection b{Vec{1.0, 0.0}};
    const auto selected = select_biased_words(e, b, 1);
    REQUIRE(selected.size() == 2);
    CHECK(selected[0].word == "pos");
    CHECK(selected[0].side == BiasSide::Positive);
    CHECK(selected[1].word == "neg");
    CHECK(selected[1].side == BiasSide::Negative);

    SUBCASE("sides partition the selection") {
        std::size_t pos = 0, neg = 0;
        for (const auto& w : selected) (w.side == BiasSide::Positive ? pos : neg) += 1;
        CHECK(pos == 1);
        CHECK(neg == 1);
    }
    SUBCASE("vocabulary smaller than 2n is rejected") {
        CHECK_THROWS_AS(select_biased_words(e, b, 2), DataError);
    }
}

TEST_CASE("cluster_purity_eval separates planted sides and not a null space") {
    Rng rng(127);
    const std::size_t per_side = 60;
    const std::size_t dim = 8;
    std::vector<std::string> words;
    for (std::size_t i = 0; i < 2 * per_side; ++i) words.push_back("w" + std::to_string(i));

    ClusterEvalConfig cfg;
    cfg.sample_size = 60;
    cfg.samples = 4;
    cfg.seed = 3;
    cfg.perplexity = 12.0;
    cfg.tsne_iterations = 350;
    cfg.kmeans_restarts = 6;

    std::vector<BiasedWord> biased;
    for (std::size_t i = 0; i < 2 * per_side; ++i)
        biased.push_back({words[i], i < per_side ? BiasSide::Positive : BiasSide::Negative});

    SUBCASE("linearly separated sides cluster cleanly") {
        Embedding e(Vocabulary(words), dim);
        Vec v(dim);
        for (std::size_t i = 0; i < 2 * per_side; ++i) {
            for (std::size_t j = 0; j < dim; ++j)
                v[j] = 0.5 * rng.gaussian() + (j == 0 ? (i < per_side ? 5.0 : -5.0) : 0.0);
            e.set_row(i, v);
        }
        const auto r = cluster_purity_eval(e, biased, cfg);
        CHECK(r.mean_v > 0.8);
        CHECK(r.samples == 4);
    }
    SUBCASE("one isotropic cloud scores near zero") {
        Embedding e(Vocabulary(words), dim);
        Vec v(dim);
        for (std::size_t i = 0; i < 2 * per_side; ++i) {
            for (auto& x : v) x = rng.gaussian();
            e.set_row(i, v);
        }
        const auto r = cluster_purity_eval(e, biased, cfg);
        CHECK(r.mean_v < 0.2);
    }
    SUBCASE("missing words are skipped and counted") {
        Embedding e(Vocabulary(words), dim);
        Vec v(dim);
        for (std::size_t i = 0; i < 2 * per_side; ++i) {
            for (auto& x : v) x = rng.gaussian();
            e.set_row(i, v);
        }
        auto extra = biased;
        extra.push_back({"ghost", BiasSide::Positive});
        const auto r = cluster_purity_eval(e, extra, cfg);
        CHECK(r.skipped_words == 1);
    }
}
