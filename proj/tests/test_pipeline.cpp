#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fairembed/core.hpp"
#include "fairembed/intervention.hpp"
#include "fairembed/pipeline.hpp"
#include "fairembed/synthetic.hpp"

using namespace fairembed;
namespace fs = std::filesystem;

namespace {

const std::string kData = FAIREMBED_DATA_DIR;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("fairembed-test-" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// Small planted corpus plus name CSV on disk; returns the corpus path.
std::string write_fixture(const TempDir& dir, std::size_t tokens, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.tokens = tokens;
    const auto made = make_synthetic_corpus(cfg);
    save_annotated_corpus_file(made.corpus, (dir.path / "corpus.txt").string());
    std::ofstream names(dir.path / "names.csv");
    names << made.names_csv;
    return (dir.path / "corpus.txt").string();
}

PipelineSpec desk_spec(const TempDir& dir, const std::string& corpus_path) {
    PipelineSpec spec;
    spec.corpus = corpus_path;
    spec.seed = 9;
    spec.output_dir = (dir.path / "out").string();
    spec.data.definitional = kData + "/definitional.tsv";
    spec.data.equalise = kData + "/equalise.tsv";
    spec.data.gender_specific = kData + "/gender_specific.txt";
    spec.data.lexicon = kData + "/lu_pairs.tsv";
    spec.data.names_csv = (dir.path / "names.csv").string();
    spec.data.weat_tests = {kData + "/weat/careers_family.json"};
    spec.data.analogy_file = kData + "/family_analogies.txt";
    spec.names_top = 24;
    spec.trainer.dim = 12;
    spec.trainer.epochs = 2;
    spec.trainer.min_count = 5;
    spec.trainer.seed = 3;
    spec.trainer.unigram_table_size = 200000;
    spec.metrics.weat_permutations = 1000;
    spec.metrics.cluster_samples = 3;
    spec.metrics.cluster_sample_size = 45;
    spec.metrics.tsne_iterations = 160;
    spec.metrics.perplexity = 10.0;
    spec.metrics.biased_per_side = 120;
    return spec;
}

// Directional effects need trained-out embeddings; this matches the
// acceptance-scale regime.
PipelineSpec full_scale_spec(const TempDir& dir, const std::string& corpus_path) {
    PipelineSpec spec = desk_spec(dir, corpus_path);
    spec.trainer.dim = 32;
    spec.trainer.epochs = 5;
    spec.trainer.min_count = 10;
    spec.trainer.seed = 1;
    spec.trainer.unigram_table_size = 10'000'000;
    spec.metrics.weat_permutations = 10000;
    spec.metrics.cluster_samples = 6;
    spec.metrics.cluster_sample_size = 150;
    spec.metrics.tsne_iterations = 300;
    spec.metrics.perplexity = 25.0;
    spec.metrics.biased_per_side = 300;
    return spec;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("pipeline spec JSON loading validates keys and variants") {
    TempDir dir("speccheck");
    const auto path = dir.path / "cfg.json";
    {
        std::ofstream f(path);
        f << R"({"corpus":"x.txt","variants":["none","nCDS"],"seed":4})";
    }
    const auto spec = load_pipeline_spec(path.string());
    CHECK(spec.variants.size() == 2);
    CHECK(spec.variants[1] == Variant::NCds);
    CHECK(spec.seed == 4);

    SUBCASE("unknown keys are rejected") {
        std::ofstream f(path);
        f << R"({"corpus":"x.txt","variants":["none"],"typo_key":1})";
        f.close();
        CHECK_THROWS_AS(load_pipeline_spec(path.string()), ConfigError);
    }
    SUBCASE("unknown variant names are rejected") {
        std::ofstream f(path);
        f << R"({"corpus":"x.txt","variants":["NCSD"]})";
        f.close();
        CHECK_THROWS_AS(load_pipeline_spec(path.string()), ConfigError);
    }
}

TEST_CASE("variant names round trip") {
    for (const auto v : {Variant::None, Variant::Cda, Variant::GCda, Variant::NCda, Variant::GCds,
                         Variant::NCds, Variant::Wed40, Variant::Wed70, Variant::NWed70})
        CHECK(parse_variant(variant_name(v)) == v);
}

TEST_CASE("pipeline with only the control variant produces one report") {
    TempDir dir("control");
    const auto corpus = write_fixture(dir, 30000, 17);
    PipelineSpec spec = desk_spec(dir, corpus);
    spec.variants = {Variant::None};
    spec.metrics.cluster = false;  // keep the control-only run light
    const auto result = run_pipeline(spec);
    CHECK(result.variants.size() == 1);
    CHECK(fs::exists(dir.path / "out" / "report-none.json"));
    CHECK(fs::exists(result.comparison_path));
    const auto& report = result.variants.at("none");
    REQUIRE(report.weat.size() == 1);
    CHECK(report.analogy.has_value());
}

TEST_CASE("names variant without name data is a data error") {
    TempDir dir("missinggaz");
    const auto corpus = write_fixture(dir, 30000, 18);
    PipelineSpec spec = desk_spec(dir, corpus);
    spec.variants = {Variant::NCds};
    spec.data.names_csv.clear();
    CHECK_THROWS_AS(run_pipeline(spec), DataError);
}

TEST_CASE("missing corpus file is a data error") {
    TempDir dir("missingcorpus");
    PipelineSpec spec = desk_spec(dir, (dir.path / "nope.txt").string());
    spec.variants = {Variant::None};
    CHECK_THROWS_AS(run_pipeline(spec), DataError);
}

TEST_CASE("pipeline rerun with the same seed is byte-identical and reuses the cache") {
    TempDir dir("rerun");
    const auto corpus = write_fixture(dir, 60000, 23);
    PipelineSpec spec = desk_spec(dir, corpus);
    spec.variants = {Variant::None, Variant::NCds};

    const auto result = run_pipeline(spec);
    const std::string first_none = slurp(dir.path / "out" / "report-none.json");
    const std::string first_comparison = slurp(result.comparison_path);
    const auto cache_dir = dir.path / "out" / "cache";
    std::size_t cached_embeddings = 0;
    for (const auto& entry : fs::directory_iterator(cache_dir)) {
        (void)entry;
        ++cached_embeddings;
    }
    CHECK(cached_embeddings == 2);

    const auto rerun = run_pipeline(spec);
    CHECK(slurp(dir.path / "out" / "report-none.json") == first_none);
    CHECK(slurp(rerun.comparison_path) == first_comparison);
    // No new artifacts were created on the rerun.
    std::size_t after = 0;
    for (const auto& entry : fs::directory_iterator(cache_dir)) {
        (void)entry;
        ++after;
    }
    CHECK(after == cached_embeddings);
}

TEST_CASE("pipeline end-to-end directional behaviour on the planted corpus") {
    TempDir dir("directional");
    const auto corpus = write_fixture(dir, 1'000'000, 3);
    PipelineSpec spec = full_scale_spec(dir, corpus);
    spec.variants = {Variant::None, Variant::NCds};

    const auto result = run_pipeline(spec);
    const auto& none = result.variants.at("none");
    const auto& ncds = result.variants.at("nCDS");

    // The names intervention slashes the planted careers-family effect
    // and the biased-word cluster purity.
    CHECK(none.weat[0].result.effect_size > 1.0);
    CHECK(std::abs(ncds.weat[0].result.effect_size) < 0.5);
    REQUIRE(none.cluster.has_value());
    REQUIRE(ncds.cluster.has_value());
    CHECK(none.cluster->mean_v > 0.4);
    CHECK(ncds.cluster->mean_v < 0.5 * none.cluster->mean_v);
}
