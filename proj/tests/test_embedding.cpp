#include <doctest.h>

#include <sstream>

#include "fairembed/core.hpp"
#include "fairembed/embedding.hpp"
#include "oracle_helpers.hpp"

using namespace fairembed;

TEST_CASE("load_embedding parses the word2vec text format") {
    std::istringstream in("2 3\na 1 0 0\nb 0 1 0\n");
    const Embedding e = load_embedding(in);
    CHECK(e.size() == 2);
    CHECK(e.dim() == 3);
    CHECK(e.vocab().word(0) == "a");
    CHECK(e.vocab().word(1) == "b");
    CHECK(e.row(0)[0] == 1.0);
    CHECK(e.row(1)[1] == 1.0);
}

TEST_CASE("load_embedding rejects malformed input") {
    SUBCASE("row arity mismatch") {
        std::istringstream in("1 2\na 1 0 0\n");
        CHECK_THROWS_AS(load_embedding(in), DataError);
    }
    SUBCASE("malformed header") {
        std::istringstream in("banana\na 1\n");
        CHECK_THROWS_AS(load_embedding(in), DataError);
    }
    SUBCASE("duplicate word") {
        std::istringstream in("2 1\na 1\na 2\n");
        CHECK_THROWS_AS(load_embedding(in), DataError);
    }
    SUBCASE("non-finite component") {
        std::istringstream in("1 1\na inf\n");
        CHECK_THROWS_AS(load_embedding(in), DataError);
    }
    SUBCASE("truncated rows") {
        std::istringstream in("2 1\na 1\n");
        CHECK_THROWS_AS(load_embedding(in), DataError);
    }
}

TEST_CASE("save_embedding canonical format") {
    Embedding e(Vocabulary({"a"}), 2);
    e.set_row(0, std::vector<double>{1.0, 0.0});
    std::ostringstream out;
    save_embedding(e, out);
    CHECK(out.str() == "1 2\na 1 0\n");
}

TEST_CASE("save_embedding of an empty vocabulary is header-only") {
    Embedding e(Vocabulary(std::vector<std::string>{}), 3);
    std::ostringstream out;
    save_embedding(e, out);
    CHECK(out.str() == "0 3\n");
}

TEST_CASE("save/load round trips exactly on random embeddings") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const auto e = oracle::random_embedding(rng, 1 + trial % 17, 1 + trial % 5);
        std::ostringstream out;
        save_embedding(e, out);
        std::istringstream in(out.str());
        const Embedding back = load_embedding(in);
        REQUIRE(back.size() == e.size());
        REQUIRE(back.dim() == e.dim());
        for (std::size_t i = 0; i < e.size(); ++i) {
            CHECK(back.vocab().word(i) == e.vocab().word(i));
            for (std::size_t j = 0; j < e.dim(); ++j) CHECK(back.row(i)[j] == e.row(i)[j]);
        }
        // save(load(x)) is byte-identical on canonical text
        std::ostringstream again;
        save_embedding(back, again);
        CHECK(again.str() == out.str());
    }
}

TEST_CASE("cosine closed forms") {
    const std::vector<double> v{0.3, -0.7, 2.0};
    CHECK(cosine(v, v) == doctest::Approx(1.0));
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == doctest::Approx(0.0));
    CHECK(cosine(std::vector<double>{1, 1}, std::vector<double>{1, 0}) ==
          doctest::Approx(std::sqrt(2.0) / 2.0));
}

TEST_CASE("cosine errors") {
    CHECK_THROWS_AS(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}), NumericError);
    CHECK_THROWS_AS(cosine(std::vector<double>{1}, std::vector<double>{1, 0}), DataError);
}

TEST_CASE("cosine symmetry, bound and scale invariance") {
    Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> u(4), v(4);
        for (auto& x : u) x = rng.gaussian();
        for (auto& x : v) x = rng.gaussian();
        const double c1 = cosine(u, v);
        CHECK(c1 == doctest::Approx(cosine(v, u)).epsilon(1e-13));
        CHECK(std::abs(c1) <= 1.0 + 1e-12);
        const double alpha = 0.01 + rng.uniform() * 50.0;
        std::vector<double> su = u;
        for (auto& x : su) x *= alpha;
        CHECK(cosine(su, v) == doctest::Approx(c1).epsilon(1e-12));
    }
}

TEST_CASE("nearest_neighbors basics") {
    Embedding e(Vocabulary({"a", "b", "c"}), 2);
    e.set_row(0, std::vector<double>{1.0, 0.0});
    e.set_row(1, std::vector<double>{0.9, 0.1});
    e.set_row(2, std::vector<double>{0.0, 1.0});

    SUBCASE("top-1 matches the brute-force cosine winner") {
        const auto nn = nearest_neighbors(e, "a", 1);
        REQUIRE(nn.entries.size() == 1);
        CHECK(nn.entries[0].first == "b");
    }
    SUBCASE("k = vocab-1 returns all other words") {
        const auto nn = nearest_neighbors(e, "a", 2);
        CHECK(nn.entries.size() == 2);
    }
    SUBCASE("unknown query") {
        CHECK_THROWS_AS(nearest_neighbors(e, "zzz", 1), DataError);
    }
    SUBCASE("exclude set is honoured") {
        const auto nn = nearest_neighbors(e, "a", 1, {"b"});
        CHECK(nn.entries[0].first == "c");
    }
}

TEST_CASE("nearest_neighbors tie-break prefers earlier vocabulary index") {
    Embedding e(Vocabulary({"q", "x", "y"}), 2);
    e.set_row(0, std::vector<double>{1.0, 0.0});
    e.set_row(1, std::vector<double>{2.0, 0.0});  // same cosine as y
    e.set_row(2, std::vector<double>{4.0, 0.0});
    const auto nn = nearest_neighbors(e, "q", 2);
    CHECK(nn.entries[0].first == "x");
    CHECK(nn.entries[1].first == "y");
}

TEST_CASE("nearest_neighbors agrees with a full brute-force sort") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 50 + static_cast<std::size_t>(rng.uniform_int(200));
        const auto e = oracle::random_embedding(rng, n, 6);
        const std::string query = e.vocab().word(rng.uniform_int(n));
        const auto nn = nearest_neighbors(e, query, n - 1);

        // Independent ranking.
        const auto qv = e.vector_of(query);
        std::vector<std::pair<double, std::size_t>> scored;
        for (std::size_t i = 0; i < n; ++i) {
            if (e.vocab().word(i) == query) continue;
            std::vector<double> row(e.row(i).begin(), e.row(i).end());
            scored.emplace_back(oracle::cosine(row, {qv.begin(), qv.end()}), i);
        }
        std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        REQUIRE(nn.entries.size() == scored.size());
        for (std::size_t r = 0; r < scored.size(); ++r) {
            CHECK(nn.entries[r].first == e.vocab().word(scored[r].second));
            CHECK(nn.entries[r].second == doctest::Approx(scored[r].first).epsilon(1e-10));
        }
    }
}

TEST_CASE("nearest_neighbors accepts a raw direction vector") {
    Embedding e(Vocabulary({"a", "b"}), 2);
    e.set_row(0, std::vector<double>{1.0, 0.0});
    e.set_row(1, std::vector<double>{0.0, 1.0});
    const auto nn = nearest_neighbors(e, std::vector<double>{0.1, 0.9}, 1);
    CHECK(nn.entries[0].first == "b");
}
