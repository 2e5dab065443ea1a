#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairembed/analogy.hpp"
#include "fairembed/clustering.hpp"
#include "fairembed/similarity.hpp"
#include "fairembed/svm.hpp"
#include "fairembed/trainer.hpp"
#include "fairembed/weat.hpp"

namespace fairembed {

enum class Variant { None, Cda, GCda, NCda, GCds, NCds, Wed40, Wed70, NWed70 };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

struct PipelineData {
    std::string definitional;      // TSV pair file
    std::string equalise;          // TSV pair file
    std::string gender_specific;   // word-per-line file
    std::string lexicon;           // TSV gendered pair lexicon
    std::string names_csv;         // "name,sex,count" (used when gazetteer empty)
    std::string gazetteer;         // precomputed pairing TSV (optional)
    std::vector<std::string> weat_tests;  // JSON test files
    std::string analogy_file;
    std::string analogy_subset = "family";
    std::string similarity_file;  // optional
};

struct PipelineMetrics {
    bool weat = true;
    std::size_t weat_permutations = 10000;
    bool cluster = true;
    std::size_t cluster_samples = 1000;
    std::size_t cluster_sample_size = 200;
    std::size_t tsne_iterations = 1000;
    double perplexity = 30.0;
    std::size_t biased_per_side = 500;
    bool reclassify = false;
    std::size_t reclassify_train_n = 1000;
    bool analogy = true;
    bool similarity = false;
};

struct PipelineSpec {
    std::string corpus;                 // annotated corpus path (or raw text)
    std::string annotation = "external";  // external | heuristic
    std::vector<Variant> variants;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    PipelineData data;
    TrainConfig trainer;
    PipelineMetrics metrics;
    std::size_t names_top = 2500;
    double substitution_probability = 0.5;
    bool expand_gender_specific = false;  // classifier expansion before WED
};

// JSON config document; unknown keys rejected to catch typos.
PipelineSpec load_pipeline_spec(const std::string& path);

struct WeatLine {
    std::string test_name;
    WeatResult result;
};

struct VariantReport {
    Variant variant = Variant::None;
    std::string embedding_hash;
    std::vector<WeatLine> weat;
    std::optional<ClusterEvalResult> cluster;
    std::optional<AnalogyReport> analogy;
    std::optional<SpearmanResult> similarity;
    std::optional<ReclassifyResult> reclassify;
};

struct PipelineResult {
    std::map<std::string, VariantReport> variants;  // keyed by variant name
    std::string comparison_path;                    // combined report JSON
};

PipelineResult run_pipeline(const PipelineSpec& spec);

}  // namespace fairembed
