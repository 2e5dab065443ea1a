#include "fairembed/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "fairembed/core.hpp"
#include "fairembed/intervention.hpp"
#include "fairembed/names.hpp"
#include "fairembed/subspace.hpp"

namespace fairembed {

namespace fs = std::filesystem;
using nlohmann::json;

Variant parse_variant(const std::string& name) {
    if (name == "none") return Variant::None;
    if (name == "CDA") return Variant::Cda;
    if (name == "gCDA") return Variant::GCda;
    if (name == "nCDA") return Variant::NCda;
    if (name == "gCDS") return Variant::GCds;
    if (name == "nCDS") return Variant::NCds;
    if (name == "WED40") return Variant::Wed40;
    if (name == "WED70") return Variant::Wed70;
    if (name == "nWED70") return Variant::NWed70;
    throw ConfigError("unknown variant '" + name +
                      "' (expected none, CDA, gCDA, nCDA, gCDS, nCDS, WED40, WED70, nWED70)");
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::None: return "none";
        case Variant::Cda: return "CDA";
        case Variant::GCda: return "gCDA";
        case Variant::NCda: return "nCDA";
        case Variant::GCds: return "gCDS";
        case Variant::NCds: return "nCDS";
        case Variant::Wed40: return "WED40";
        case Variant::Wed70: return "WED70";
        case Variant::NWed70: return "nWED70";
    }
    return "?";
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string hash_hex(std::string_view content) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    return std::string(buf);
}

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

bool is_names_variant(Variant v) {
    return v == Variant::NCda || v == Variant::NCds || v == Variant::NWed70;
}
bool is_corpus_variant(Variant v) {
    return v == Variant::Cda || v == Variant::GCda || v == Variant::NCda || v == Variant::GCds ||
           v == Variant::NCds;
}
bool is_wed_variant(Variant v) {
    return v == Variant::Wed40 || v == Variant::Wed70 || v == Variant::NWed70;
}

}  // namespace

PipelineSpec load_pipeline_spec(const std::string& path) {
    json j;
    {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open pipeline config: " + path);
        try {
            in >> j;
        } catch (const json::exception& ex) {
            throw ConfigError("bad pipeline JSON: " + std::string(ex.what()));
        }
    }
    require_keys(j,
                 {"corpus", "annotation", "variants", "seed", "output_dir", "data", "trainer",
                  "metrics", "names_top", "substitution_probability", "expand_gender_specific"},
                 path);
    PipelineSpec spec;
    spec.corpus = j.value("corpus", "");
    spec.annotation = j.value("annotation", "external");
    if (spec.annotation != "external" && spec.annotation != "heuristic")
        throw ConfigError("annotation must be 'external' or 'heuristic'");
    if (!j.contains("variants")) throw ConfigError("pipeline config: missing 'variants'");
    for (const auto& v : j.at("variants")) spec.variants.push_back(parse_variant(v.get<std::string>()));
    spec.seed = j.value("seed", std::uint64_t{1});
    spec.output_dir = j.value("output_dir", "out");
    spec.names_top = j.value("names_top", std::size_t{2500});
    spec.substitution_probability = j.value("substitution_probability", 0.5);
    spec.expand_gender_specific = j.value("expand_gender_specific", false);

    if (j.contains("data")) {
        const auto& d = j.at("data");
        require_keys(d,
                     {"definitional", "equalise", "gender_specific", "lexicon", "names_csv",
                      "gazetteer", "weat_tests", "analogy_file", "analogy_subset",
                      "similarity_file"},
                     "data");
        spec.data.definitional = d.value("definitional", "");
        spec.data.equalise = d.value("equalise", "");
        spec.data.gender_specific = d.value("gender_specific", "");
        spec.data.lexicon = d.value("lexicon", "");
        spec.data.names_csv = d.value("names_csv", "");
        spec.data.gazetteer = d.value("gazetteer", "");
        if (d.contains("weat_tests"))
            for (const auto& t : d.at("weat_tests"))
                spec.data.weat_tests.push_back(t.get<std::string>());
        spec.data.analogy_file = d.value("analogy_file", "");
        spec.data.analogy_subset = d.value("analogy_subset", "family");
        spec.data.similarity_file = d.value("similarity_file", "");
    }
    if (j.contains("trainer")) {
        const auto& t = j.at("trainer");
        require_keys(t,
                     {"dim", "epochs", "window", "negatives", "min_count", "learning_rate",
                      "subsample", "threads", "deterministic"},
                     "trainer");
        spec.trainer.dim = t.value("dim", spec.trainer.dim);
        spec.trainer.epochs = t.value("epochs", spec.trainer.epochs);
        spec.trainer.window = t.value("window", spec.trainer.window);
        spec.trainer.negatives = t.value("negatives", spec.trainer.negatives);
        spec.trainer.min_count = t.value("min_count", spec.trainer.min_count);
        spec.trainer.learning_rate = t.value("learning_rate", spec.trainer.learning_rate);
        spec.trainer.subsample = t.value("subsample", spec.trainer.subsample);
        spec.trainer.threads = t.value("threads", spec.trainer.threads);
        spec.trainer.deterministic = t.value("deterministic", spec.trainer.deterministic);
    }
    if (j.contains("metrics")) {
        const auto& m = j.at("metrics");
        require_keys(m,
                     {"weat", "weat_permutations", "cluster", "cluster_samples",
                      "cluster_sample_size", "tsne_iterations", "perplexity", "biased_per_side",
                      "reclassify", "reclassify_train_n", "analogy", "similarity"},
                     "metrics");
        spec.metrics.weat = m.value("weat", spec.metrics.weat);
        spec.metrics.weat_permutations =
            m.value("weat_permutations", spec.metrics.weat_permutations);
        spec.metrics.cluster = m.value("cluster", spec.metrics.cluster);
        spec.metrics.cluster_samples = m.value("cluster_samples", spec.metrics.cluster_samples);
        spec.metrics.cluster_sample_size =
            m.value("cluster_sample_size", spec.metrics.cluster_sample_size);
        spec.metrics.tsne_iterations = m.value("tsne_iterations", spec.metrics.tsne_iterations);
        spec.metrics.perplexity = m.value("perplexity", spec.metrics.perplexity);
        spec.metrics.biased_per_side = m.value("biased_per_side", spec.metrics.biased_per_side);
        spec.metrics.reclassify = m.value("reclassify", spec.metrics.reclassify);
        spec.metrics.reclassify_train_n =
            m.value("reclassify_train_n", spec.metrics.reclassify_train_n);
        spec.metrics.analogy = m.value("analogy", spec.metrics.analogy);
        spec.metrics.similarity = m.value("similarity", spec.metrics.similarity);
    }
    return spec;
}

namespace {

struct PipelineContext {
    explicit PipelineContext(const PipelineSpec& s) : spec(s) {}

    const PipelineSpec& spec;
    fs::path out_dir;
    fs::path cache_dir;
    json provenance = json::object();

    GenderPairLexicon lexicon;
    NamePairing pairing;
    bool have_pairing = false;
    Corpus base_corpus;
    std::string base_corpus_hash;
    WedWordSets wed_sets;
    std::vector<WeatTest> weat_tests;
    std::vector<AnalogyRow> analogy_rows;
    std::vector<WordPair> family_pairs;

    Embedding base_embedding;
    std::vector<BiasedWord> biased_words;
};

std::string data_hash(PipelineContext& ctx, const std::string& path, const char* label) {
    const std::string h = hash_hex(read_file(path));
    ctx.provenance["data"][label] = {{"path", path}, {"hash", h}};
    return h;
}

// Train or reuse a cached embedding keyed by (training text, trainer config).
Embedding embedding_for_text(PipelineContext& ctx, const std::string& text,
                             const std::string& stage) {
    const TrainConfig& t = ctx.spec.trainer;
    std::ostringstream key;
    key << "dim=" << t.dim << ";epochs=" << t.epochs << ";window=" << t.window
        << ";negatives=" << t.negatives << ";min_count=" << t.min_count
        << ";lr=" << t.learning_rate << ";subsample=" << t.subsample << ";seed=" << t.seed
        << ";det=" << t.deterministic << ";text=" << hash_hex(text);
    const std::string h = hash_hex(key.str());
    const fs::path cached = ctx.cache_dir / ("emb-" + h + ".vec");
    // Cache state and losses stay out of the reports so reruns with an
    // unchanged configuration produce byte-identical bundles.
    ctx.provenance["stages"][stage] = {{"embedding_hash", h}};
    if (fs::exists(cached)) {
        std::cerr << "stage " << stage << ": reusing cached embedding " << h << "\n";
        return load_embedding_file(cached.string());
    }
    std::istringstream in(text);
    TrainResult trained = train(in, t);
    save_embedding_file(trained.embedding, cached.string());
    std::cerr << "stage " << stage << ": trained embedding " << h << " (final epoch loss "
              << (trained.epoch_losses.empty() ? 0.0 : trained.epoch_losses.back()) << ")\n";
    return std::move(trained.embedding);
}

std::string corpus_text(const Corpus& corpus) {
    std::ostringstream out;
    write_training_text(corpus, out);
    return out.str();
}

Embedding build_variant_embedding(PipelineContext& ctx, Variant v) {
    if (v == Variant::None) return ctx.base_embedding;
    if (is_corpus_variant(v)) {
        InterventionConfig cfg;
        cfg.strategy = (v == Variant::GCds || v == Variant::NCds)
                           ? InterventionStrategy::Substitute
                           : InterventionStrategy::Augment;
        cfg.mode = v == Variant::Cda                              ? InterventionMode::Naive
                   : (v == Variant::GCda || v == Variant::GCds)   ? InterventionMode::Grammar
                                                                  : InterventionMode::Names;
        cfg.substitution_probability = ctx.spec.substitution_probability;
        cfg.seed = derive_seed(ctx.spec.seed, "cds-" + variant_name(v));
        if (cfg.mode == InterventionMode::Names) {
            if (!ctx.have_pairing) throw DataError("names variant requires a name pairing");
            cfg.pairing = &ctx.pairing;
        }
        const Corpus transformed = cfg.strategy == InterventionStrategy::Augment
                                       ? apply_cda(ctx.base_corpus, ctx.lexicon, cfg)
                                       : apply_cds(ctx.base_corpus, ctx.lexicon, cfg);
        return embedding_for_text(ctx, corpus_text(transformed), variant_name(v));
    }
    // WED variants debias the base embedding.
    WedWordSets sets = ctx.wed_sets;
    if (ctx.spec.expand_gender_specific) {
        // Neutral seeds: frequent words not in the specific set.
        std::unordered_set<std::string> neutral_seeds;
        for (std::size_t i = 0; i < ctx.base_embedding.size() && neutral_seeds.size() < 200; ++i) {
            const std::string& w = ctx.base_embedding.vocab().word(i);
            if (!sets.gender_specific.count(w)) neutral_seeds.insert(w);
        }
        std::unordered_set<std::string> present_seeds;
        for (const auto& w : sets.gender_specific)
            if (ctx.base_embedding.find(w)) present_seeds.insert(w);
        sets.gender_specific =
            expand_gender_specific(ctx.base_embedding, present_seeds, neutral_seeds);
    }
    std::vector<WordPair> name_pairs;
    if (v == Variant::NWed70) {
        if (!ctx.have_pairing) throw DataError("nWED70 requires a name pairing");
        for (const auto& [m, f] : ctx.pairing.pairs()) {
            // Match trainer preprocessing: lowercase forms.
            std::string lm = m, lf = f;
            for (auto& c : lm) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            for (auto& c : lf) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            name_pairs.emplace_back(lm, lf);
        }
    }
    WedReport report;
    const WedVariant wv = v == Variant::Wed40   ? WedVariant::Wed40
                          : v == Variant::Wed70 ? WedVariant::Wed70
                                                : WedVariant::NWed70;
    Embedding out = run_wed(ctx.base_embedding, sets, wv, name_pairs, &report);
    ctx.provenance["stages"][variant_name(v)] = {
        {"subspace_k", report.subspace_k},
        {"variance_fraction", report.variance_fraction},
        {"neutralised_words", report.neutralised_words},
        {"equalised_pairs", report.equalised_pairs},
        {"skipped_pairs", report.skipped_pairs.size()}};
    return out;
}

json weat_json(const WeatLine& line) {
    return {{"test", line.test_name},
            {"d", line.result.effect_size},
            {"p_one_sided", line.result.p_one_sided},
            {"permutations", line.result.permutations_used},
            {"exact", line.result.exact},
            {"dropped_words", line.result.dropped_words}};
}

json report_json(const VariantReport& r) {
    json j;
    j["variant"] = variant_name(r.variant);
    j["embedding_hash"] = r.embedding_hash;
    if (!r.weat.empty()) {
        j["weat"] = json::array();
        for (const auto& line : r.weat) j["weat"].push_back(weat_json(line));
    }
    if (r.cluster) {
        j["cluster"] = {{"mean_v", r.cluster->mean_v},
                        {"std_v", r.cluster->std_v},
                        {"mean_homogeneity", r.cluster->mean_homogeneity},
                        {"mean_completeness", r.cluster->mean_completeness},
                        {"samples", r.cluster->samples},
                        {"skipped_words", r.cluster->skipped_words}};
    }
    if (r.analogy) {
        j["analogy"] = {{"total", r.analogy->total},
                        {"correct", r.analogy->correct},
                        {"skipped", r.analogy->skipped},
                        {"error_rate", r.analogy->error_rate},
                        {"empty_evaluation", r.analogy->empty_evaluation}};
    }
    if (r.similarity) {
        j["similarity"] = {{"r_s", r.similarity->r_s},
                           {"p_two_sided", r.similarity->p_two_sided},
                           {"pairs_evaluated", r.similarity->pairs_evaluated},
                           {"pairs_skipped", r.similarity->pairs_skipped}};
    }
    if (r.reclassify) {
        j["reclassify"] = {{"accuracy", r.reclassify->accuracy},
                           {"train_words", r.reclassify->train_words},
                           {"test_words", r.reclassify->test_words},
                           {"skipped_words", r.reclassify->skipped_words}};
    }
    return j;
}

}  // namespace

PipelineResult run_pipeline(const PipelineSpec& spec) {
    if (spec.variants.empty()) throw ConfigError("pipeline: no variants requested");

    PipelineContext ctx(spec);
    ctx.out_dir = spec.output_dir;
    ctx.cache_dir = ctx.out_dir / "cache";
    fs::create_directories(ctx.cache_dir);

    const bool needs_names =
        std::any_of(spec.variants.begin(), spec.variants.end(), is_names_variant) ||
        spec.annotation == "heuristic";
    const bool needs_wed = std::any_of(spec.variants.begin(), spec.variants.end(), is_wed_variant);
    const bool needs_corpus_transform =
        std::any_of(spec.variants.begin(), spec.variants.end(), is_corpus_variant);

    // Resolve shared resources; missing files surface as data errors here.
    if (needs_corpus_transform) {
        if (spec.data.lexicon.empty()) throw DataError("pipeline: lexicon file required");
        data_hash(ctx, spec.data.lexicon, "lexicon");
        ctx.lexicon = load_lexicon_file(spec.data.lexicon);
    }
    if (needs_names) {
        if (!spec.data.gazetteer.empty()) {
            data_hash(ctx, spec.data.gazetteer, "gazetteer");
            ctx.pairing = load_pairing_file(spec.data.gazetteer);
        } else if (!spec.data.names_csv.empty()) {
            data_hash(ctx, spec.data.names_csv, "names_csv");
            ctx.pairing = match_names(load_name_table_file(spec.data.names_csv), spec.names_top);
        } else {
            throw DataError("names variant requires a gazetteer or names_csv data file");
        }
        ctx.have_pairing = true;
    }
    if (needs_wed) {
        if (spec.data.definitional.empty() || spec.data.equalise.empty())
            throw DataError("WED variants require definitional and equalise pair files");
        data_hash(ctx, spec.data.definitional, "definitional");
        data_hash(ctx, spec.data.equalise, "equalise");
        ctx.wed_sets.definitional.pairs = load_pair_file(spec.data.definitional);
        ctx.wed_sets.equalise = load_pair_file(spec.data.equalise);
        if (!spec.data.gender_specific.empty()) {
            data_hash(ctx, spec.data.gender_specific, "gender_specific");
            ctx.wed_sets.gender_specific = load_word_set(spec.data.gender_specific);
        }
    }
    if (spec.metrics.weat) {
        for (const auto& path : spec.data.weat_tests) {
            data_hash(ctx, path, path.c_str());
            ctx.weat_tests.push_back(load_weat_test(path));
        }
    }
    if (spec.metrics.analogy || spec.metrics.cluster) {
        if (spec.data.analogy_file.empty())
            throw DataError("analogy/cluster metrics require an analogy file");
        data_hash(ctx, spec.data.analogy_file, "analogy_file");
        ctx.analogy_rows = load_analogy_section(spec.data.analogy_file, spec.data.analogy_subset);
        ctx.family_pairs = analogy_section_pairs(ctx.analogy_rows);
    }
    if (spec.metrics.similarity && spec.data.similarity_file.empty())
        throw DataError("similarity metric requires a judgements file");
    if (spec.metrics.similarity) data_hash(ctx, spec.data.similarity_file, "similarity_file");

    // Base corpus and unmitigated embedding.
    if (spec.corpus.empty()) throw DataError("pipeline: corpus path required");
    const std::string corpus_raw = read_file(spec.corpus);
    ctx.provenance["data"]["corpus"] = {{"path", spec.corpus}, {"hash", hash_hex(corpus_raw)}};
    if (spec.annotation == "external") {
        std::istringstream in(corpus_raw);
        ctx.base_corpus = load_annotated_corpus(in);
    } else {
        std::istringstream in(corpus_raw);
        ctx.base_corpus = heuristic_annotate(in, ctx.pairing);
    }
    ctx.base_embedding = embedding_for_text(ctx, corpus_text(ctx.base_corpus), "none");

    // Bias direction and biased-word selection on the unmitigated space.
    if (spec.metrics.cluster || spec.metrics.reclassify) {
        const BiasDirection b = bias_direction(ctx.base_embedding, ctx.family_pairs);
        ctx.biased_words =
            select_biased_words(ctx.base_embedding, b, spec.metrics.biased_per_side);
    }

    PipelineResult result;
    std::vector<Embedding> embeddings(spec.variants.size());
    for (std::size_t i = 0; i < spec.variants.size(); ++i)
        embeddings[i] = build_variant_embedding(ctx, spec.variants[i]);

    for (std::size_t i = 0; i < spec.variants.size(); ++i) {
        const Variant v = spec.variants[i];
        const Embedding& emb = embeddings[i];
        VariantReport report;
        report.variant = v;
        {
            std::ostringstream ss;
            save_embedding(emb, ss);
            report.embedding_hash = hash_hex(ss.str());
        }
        if (spec.metrics.weat) {
            for (const auto& test : ctx.weat_tests) {
                WeatLine line;
                line.test_name = test.name;
                line.result = weat_run(test, emb, spec.metrics.weat_permutations,
                                       derive_seed(spec.seed, "weat-" + variant_name(v) + test.name));
                report.weat.push_back(std::move(line));
            }
        }
        if (spec.metrics.cluster) {
            ClusterEvalConfig ccfg;
            ccfg.sample_size = spec.metrics.cluster_sample_size;
            ccfg.samples = spec.metrics.cluster_samples;
            ccfg.seed = derive_seed(spec.seed, "cluster-" + variant_name(v));
            ccfg.perplexity = spec.metrics.perplexity;
            ccfg.tsne_iterations = spec.metrics.tsne_iterations;
            report.cluster = cluster_purity_eval(emb, ctx.biased_words, ccfg);
        }
        if (spec.metrics.reclassify)
            report.reclassify =
                svm_reclassify(emb, ctx.biased_words, spec.metrics.reclassify_train_n,
                               derive_seed(spec.seed, "svm-" + variant_name(v)));
        if (spec.metrics.analogy) report.analogy = run_analogy_suite(emb, ctx.analogy_rows);
        if (spec.metrics.similarity)
            report.similarity = similarity_eval(emb, spec.data.similarity_file);

        const json rj = report_json(report);
        std::ofstream out(ctx.out_dir / ("report-" + variant_name(v) + ".json"));
        out << rj.dump(2) << '\n';
        result.variants.emplace(variant_name(v), std::move(report));
    }

    // Combined comparison table plus pairwise significance of the cluster
    // V-measure samples.
    json combined;
    combined["config"] = {{"seed", spec.seed},
                          {"variants", json::array()},
                          {"trainer_dim", spec.trainer.dim},
                          {"trainer_epochs", spec.trainer.epochs}};
    for (const auto& v : spec.variants)
        combined["config"]["variants"].push_back(variant_name(v));
    combined["provenance"] = ctx.provenance;
    combined["rows"] = json::array();
    for (const auto& [name, report] : result.variants) combined["rows"].push_back(report_json(report));
    if (spec.metrics.cluster) {
        json sig = json::object();
        for (const auto& [n1, r1] : result.variants)
            for (const auto& [n2, r2] : result.variants) {
                if (n1 >= n2) continue;
                const double p = permutation_compare(
                    r1.cluster->sample_v, r2.cluster->sample_v, 10000,
                    derive_seed(spec.seed, "sig-" + n1 + "-" + n2));
                sig[n1 + " vs " + n2] = p;
            }
        combined["cluster_significance"] = sig;
    }
    const fs::path comparison = ctx.out_dir / "comparison.json";
    std::ofstream out(comparison);
    out << combined.dump(2) << '\n';
    result.comparison_path = comparison.string();
    return result;
}

}  // namespace fairembed
