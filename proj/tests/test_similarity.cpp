#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "fairembed/core.hpp"
#include "fairembed/similarity.hpp"
#include "oracle_helpers.hpp"

using namespace fairembed;

TEST_CASE("average ranks handle ties") {
    const auto r = average_ranks({10.0, 20.0, 20.0, 5.0});
    CHECK(r[0] == doctest::Approx(2.0));
    CHECK(r[1] == doctest::Approx(3.5));
    CHECK(r[2] == doctest::Approx(3.5));
    CHECK(r[3] == doctest::Approx(1.0));
}

TEST_CASE("spearman closed forms") {
    SUBCASE("monotone map gives r_s = 1") {
        const auto r = spearman({1, 2, 3, 4, 5}, {10, 20, 30, 40, 50});
        CHECK(r.r_s == doctest::Approx(1.0));
        CHECK(r.p_two_sided == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("anti-monotone map gives r_s = -1") {
        const auto r = spearman({1, 2, 3, 4, 5}, {50, 40, 30, 20, 10});
        CHECK(r.r_s == doctest::Approx(-1.0));
    }
    SUBCASE("fewer than 3 pairs rejected") {
        CHECK_THROWS_AS(spearman({1, 2}, {3, 4}), DataError);
    }
    SUBCASE("constant input rejected") {
        CHECK_THROWS_AS(spearman({1, 1, 1}, {1, 2, 3}), NumericError);
    }
}

TEST_CASE("spearman equals the counting-rank oracle on random instances") {
    Rng rng(71);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 20;
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = static_cast<double>(rng.uniform_int(12));  // ties likely
        for (auto& v : y) v = rng.gaussian();
        bool x_constant = true;
        for (auto v : x)
            if (v != x[0]) x_constant = false;
        if (x_constant) continue;
        const auto got = spearman(x, y);
        CHECK(got.r_s == doctest::Approx(oracle::spearman_oracle(x, y)).epsilon(1e-10));
    }
}

TEST_CASE("two-sided p-value behaves across the range") {
    Rng rng(73);
    std::vector<double> x(30), y(30);
    for (std::size_t i = 0; i < 30; ++i) {
        x[i] = static_cast<double>(i);
        y[i] = static_cast<double>(i) + 6.0 * rng.gaussian();
    }
    const auto r = spearman(x, y);
    CHECK(r.p_two_sided > 0.0);
    CHECK(r.p_two_sided < 1.0);
    // Strong correlation should be deemed significant.
    std::vector<double> y2(30);
    for (std::size_t i = 0; i < 30; ++i) y2[i] = x[i] + 0.3 * rng.gaussian();
    CHECK(spearman(x, y2).p_two_sided < 0.01);
}

TEST_CASE("incomplete beta sanity") {
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == doctest::Approx(0.0));
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == doctest::Approx(1.0));
    // I_x(1,1) = x
    CHECK(incomplete_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-10));
    // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    CHECK(incomplete_beta(2.5, 1.5, 0.3) ==
          doctest::Approx(1.0 - incomplete_beta(1.5, 2.5, 0.7)).epsilon(1e-10));
}

TEST_CASE("similarity_eval reads judgement files and skips missing words") {
    Rng rng(79);
    const auto e = oracle::random_embedding(rng, 12, 4);
    const std::string path = "simtest_judgements.txt";
    {
        std::ofstream f(path);
        f << "# comment line\n";
        f << "w0 w1 3.5\n";
        f << "w2,w3,1.25\n";
        f << "w4\tw5\t9.9\n";
        f << "ghost w1 5.0\n";
        f << "w6 w7 0.5\n";
    }
    const auto r = similarity_eval(e, path);
    CHECK(r.pairs_evaluated == 4);
    CHECK(r.pairs_skipped == 1);
    std::remove(path.c_str());

    SUBCASE("fewer than 3 resolvable pairs is an error") {
        const std::string short_path = "simtest_short.txt";
        {
            std::ofstream f(short_path);
            f << "w0 w1 1\nw2 ghost 2\n";
        }
        CHECK_THROWS_AS(similarity_eval(e, short_path), DataError);
        std::remove(short_path.c_str());
    }
}
