#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairembed/analogy.hpp"
#include "fairembed/clustering.hpp"
#include "fairembed/core.hpp"
#include "fairembed/embedding.hpp"
#include "fairembed/intervention.hpp"
#include "fairembed/names.hpp"
#include "fairembed/pipeline.hpp"
#include "fairembed/similarity.hpp"
#include "fairembed/subspace.hpp"
#include "fairembed/svm.hpp"
#include "fairembed/synthetic.hpp"
#include "fairembed/trainer.hpp"
#include "fairembed/weat.hpp"

namespace fe = fairembed;
using nlohmann::json;

namespace {

struct NamesMatchArgs {
    std::string input, out;
    std::size_t top = 2500;
    std::string transform = "log1p";
};

struct CorpusTransformArgs {
    std::string input, output, lexicon, pairs, training_text;
    std::string mode = "naive", strategy = "cda";
    double prob = 0.5;
    std::uint64_t seed = 0;
};

struct TrainArgs {
    std::string input, output;
    fe::TrainConfig cfg;
};

struct DebiasArgs {
    std::string embedding, output, report;
    std::string variant = "WED40";
    std::string definitional, equalise, gender_specific, gazetteer;
    bool expand = false;
};

fe::InterventionMode parse_mode(const std::string& m) {
    if (m == "naive") return fe::InterventionMode::Naive;
    if (m == "grammar") return fe::InterventionMode::Grammar;
    if (m == "names") return fe::InterventionMode::Names;
    throw fe::ConfigError("unknown mode '" + m + "' (naive|grammar|names)");
}

json weat_result_json(const std::string& name, const fe::WeatResult& r) {
    return {{"test", name},
            {"d", r.effect_size},
            {"p_one_sided", r.p_one_sided},
            {"permutations", r.permutations_used},
            {"exact", r.exact},
            {"dropped_words", r.dropped_words}};
}

std::vector<fe::BiasedWord> biased_from_base(const std::string& base_embedding_path,
                                             const std::string& analogy_file,
                                             const std::string& subset, std::size_t per_side) {
    const fe::Embedding base = fe::load_embedding_file(base_embedding_path);
    const auto rows = fe::load_analogy_section(analogy_file, subset);
    const auto pairs = fe::analogy_section_pairs(rows);
    const fe::BiasDirection b = fe::bias_direction(base, pairs);
    return fe::select_biased_words(base, b, per_side);
}

int run(int argc, char** argv) {
    CLI::App app{"gender-bias mitigation and evaluation for word embeddings"};
    app.require_subcommand(1);

    // names match
    auto* names = app.add_subcommand("names", "first-name gazetteer construction");
    names->require_subcommand(1);
    NamesMatchArgs nm;
    auto* names_match = names->add_subcommand("match", "pair names by Hungarian matching");
    names_match->add_option("--input", nm.input, "name,sex,count CSV")->required();
    names_match->add_option("--top", nm.top, "names per gender");
    names_match->add_option("--transform", nm.transform, "raw|log1p");
    names_match->add_option("--out", nm.out, "output pairing TSV")->required();
    names_match->callback([&] {
        const auto transform = nm.transform == "raw"       ? fe::AxisTransform::Raw
                               : nm.transform == "log1p"   ? fe::AxisTransform::Log1p
                                                           : throw fe::ConfigError(
                                                               "transform must be raw or log1p");
        const auto table = fe::load_name_table_file(nm.input);
        const auto pairing = fe::match_names(table, nm.top, transform);
        fe::save_pairing_file(pairing, nm.out);
        std::cout << "paired " << pairing.size() << " names -> " << nm.out << "\n";
    });

    // corpus transform | stats | annotate
    auto* corpus_cmd = app.add_subcommand("corpus", "counterfactual corpus operations");
    corpus_cmd->require_subcommand(1);
    CorpusTransformArgs ct;
    auto* transform = corpus_cmd->add_subcommand("transform", "apply CDA/CDS intervention");
    transform->add_option("--input", ct.input, "annotated corpus")->required();
    transform->add_option("--output", ct.output, "annotated output");
    transform->add_option("--mode", ct.mode, "naive|grammar|names");
    transform->add_option("--strategy", ct.strategy, "cda|cds");
    transform->add_option("--prob", ct.prob, "substitution probability");
    transform->add_option("--seed", ct.seed, "substitution seed");
    transform->add_option("--pairs", ct.pairs, "name pairing TSV (names mode)");
    transform->add_option("--lexicon", ct.lexicon, "gendered pair lexicon TSV")->required();
    transform->add_option("--training-text", ct.training_text, "also write training text here");
    transform->callback([&] {
        fe::InterventionConfig cfg;
        cfg.mode = parse_mode(ct.mode);
        if (ct.strategy == "cda")
            cfg.strategy = fe::InterventionStrategy::Augment;
        else if (ct.strategy == "cds")
            cfg.strategy = fe::InterventionStrategy::Substitute;
        else
            throw fe::ConfigError("strategy must be cda or cds");
        cfg.substitution_probability = ct.prob;
        cfg.seed = ct.seed;
        fe::NamePairing pairing;
        if (cfg.mode == fe::InterventionMode::Names) {
            if (ct.pairs.empty()) throw fe::ConfigError("names mode requires --pairs");
            pairing = fe::load_pairing_file(ct.pairs);
            cfg.pairing = &pairing;
        }
        const auto lexicon = fe::load_lexicon_file(ct.lexicon);
        const auto corpus = fe::load_annotated_corpus_file(ct.input);
        const auto out = cfg.strategy == fe::InterventionStrategy::Augment
                             ? fe::apply_cda(corpus, lexicon, cfg)
                             : fe::apply_cds(corpus, lexicon, cfg);
        if (!ct.output.empty()) fe::save_annotated_corpus_file(out, ct.output);
        if (!ct.training_text.empty()) fe::write_training_text_file(out, ct.training_text);
        if (ct.output.empty() && ct.training_text.empty())
            throw fe::ConfigError("nothing to write: give --output and/or --training-text");
        std::cout << "documents in: " << corpus.size() << ", out: " << out.size() << "\n";
    });

    std::string stats_input;
    auto* stats = corpus_cmd->add_subcommand("stats", "type/token statistics");
    stats->add_option("--input", stats_input, "annotated corpus")->required();
    stats->callback([&] {
        const auto corpus = fe::load_annotated_corpus_file(stats_input);
        const auto s = fe::corpus_stats(corpus);
        json j = {{"types", s.type_count},
                  {"tokens", s.token_count},
                  {"type_token_ratio", s.type_token_ratio},
                  {"even_frequency_fraction", s.even_frequency_fraction}};
        std::cout << j.dump(2) << "\n";
    });

    std::string ann_input, ann_gazetteer, ann_output;
    auto* annotate = corpus_cmd->add_subcommand("annotate", "heuristic fallback annotation");
    annotate->add_option("--input", ann_input, "raw text, blank-line document breaks")->required();
    annotate->add_option("--gazetteer", ann_gazetteer, "name pairing TSV")->required();
    annotate->add_option("--output", ann_output, "annotated corpus")->required();
    annotate->callback([&] {
        std::ifstream in(ann_input);
        if (!in) throw fe::DataError("cannot open input: " + ann_input);
        const auto pairing = fe::load_pairing_file(ann_gazetteer);
        const auto corpus = fe::heuristic_annotate(in, pairing);
        fe::save_annotated_corpus_file(corpus, ann_output);
        std::cout << "annotated " << corpus.size() << " documents\n";
    });

    // train
    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "CBOW negative-sampling trainer");
    train_cmd->add_option("--input", tr.input, "training text, one document per line")->required();
    train_cmd->add_option("--output", tr.output, "word2vec text output")->required();
    train_cmd->add_option("--dim", tr.cfg.dim);
    train_cmd->add_option("--epochs", tr.cfg.epochs);
    train_cmd->add_option("--window", tr.cfg.window);
    train_cmd->add_option("--negatives", tr.cfg.negatives);
    train_cmd->add_option("--min-count", tr.cfg.min_count);
    train_cmd->add_option("--lr", tr.cfg.learning_rate);
    train_cmd->add_option("--subsample", tr.cfg.subsample);
    train_cmd->add_option("--seed", tr.cfg.seed);
    train_cmd->add_option("--threads", tr.cfg.threads);
    train_cmd->add_flag("--deterministic,!--parallel", tr.cfg.deterministic,
                        "single-threaded bit-reproducible mode (default)");
    train_cmd->callback([&] {
        const auto result = fe::train_file(tr.input, tr.cfg);
        fe::save_embedding_file(result.embedding, tr.output);
        json losses = result.epoch_losses;
        std::cout << json{{"vocabulary", result.embedding.size()},
                          {"dim", result.embedding.dim()},
                          {"epoch_losses", losses}}
                         .dump(2)
                  << "\n";
    });

    // debias
    DebiasArgs db;
    auto* debias = app.add_subcommand("debias", "linear-subspace debiasing (WED)");
    debias->add_option("--embedding", db.embedding)->required();
    debias->add_option("--output", db.output)->required();
    debias->add_option("--variant", db.variant, "WED40|WED70|nWED70");
    debias->add_option("--definitional", db.definitional)->required();
    debias->add_option("--equalise", db.equalise)->required();
    debias->add_option("--gender-specific", db.gender_specific);
    debias->add_option("--gazetteer", db.gazetteer, "name pairing TSV (nWED70)");
    debias->add_flag("--expand", db.expand, "expand the gender-specific set with a classifier");
    debias->add_option("--report", db.report, "JSON report path");
    debias->callback([&] {
        const fe::Embedding e = fe::load_embedding_file(db.embedding);
        fe::WedWordSets sets;
        sets.definitional.pairs = fe::load_pair_file(db.definitional);
        sets.equalise = fe::load_pair_file(db.equalise);
        if (!db.gender_specific.empty())
            sets.gender_specific = fe::load_word_set(db.gender_specific);
        fe::WedVariant variant;
        std::vector<fe::WordPair> name_pairs;
        if (db.variant == "WED40")
            variant = fe::WedVariant::Wed40;
        else if (db.variant == "WED70")
            variant = fe::WedVariant::Wed70;
        else if (db.variant == "nWED70")
            variant = fe::WedVariant::NWed70;
        else
            throw fe::ConfigError("variant must be WED40, WED70 or nWED70");
        if (variant == fe::WedVariant::NWed70) {
            if (db.gazetteer.empty()) throw fe::ConfigError("nWED70 requires --gazetteer");
            for (const auto& [m, f] : fe::load_pairing_file(db.gazetteer).pairs()) {
                std::string lm = m, lf = f;
                for (auto& c : lm) c = static_cast<char>(std::tolower((unsigned char)c));
                for (auto& c : lf) c = static_cast<char>(std::tolower((unsigned char)c));
                name_pairs.emplace_back(lm, lf);
            }
        }
        if (db.expand) {
            std::unordered_set<std::string> seeds, neutral_seeds;
            for (const auto& w : sets.gender_specific)
                if (e.find(w)) seeds.insert(w);
            for (std::size_t i = 0; i < e.size() && neutral_seeds.size() < 200; ++i)
                if (!seeds.count(e.vocab().word(i))) neutral_seeds.insert(e.vocab().word(i));
            sets.gender_specific = fe::expand_gender_specific(e, seeds, neutral_seeds);
        }
        fe::WedReport report;
        const fe::Embedding out = fe::run_wed(e, sets, variant, name_pairs, &report);
        fe::save_embedding_file(out, db.output);
        json j = {{"subspace_k", report.subspace_k},
                  {"variance_fraction", report.variance_fraction},
                  {"eigenvalue_shares", report.eigenvalue_shares},
                  {"neutralised_words", report.neutralised_words},
                  {"equalised_pairs", report.equalised_pairs},
                  {"skipped_pairs", report.skipped_pairs.size()}};
        if (!db.report.empty()) {
            std::ofstream rf(db.report);
            rf << j.dump(2) << "\n";
        }
        std::cout << j.dump(2) << "\n";
    });

    // eval
    auto* eval = app.add_subcommand("eval", "embedding evaluations");
    eval->require_subcommand(1);

    std::string we_embedding, we_test;
    std::size_t we_permutations = 10000;
    std::uint64_t we_seed = 0;
    auto* eval_weat = eval->add_subcommand("weat", "association test effect size and p-value");
    eval_weat->add_option("--embedding", we_embedding)->required();
    eval_weat->add_option("--test", we_test, "WEAT JSON file")->required();
    eval_weat->add_option("--permutations", we_permutations);
    eval_weat->add_option("--seed", we_seed);
    eval_weat->callback([&] {
        const auto e = fe::load_embedding_file(we_embedding);
        const auto t = fe::load_weat_test(we_test);
        std::cout << weat_result_json(t.name, fe::weat_run(t, e, we_permutations, we_seed)).dump(2)
                  << "\n";
    });

    std::string cl_embedding, cl_base, cl_analogy, cl_subset = "family";
    fe::ClusterEvalConfig cl_cfg;
    std::size_t cl_per_side = 500;
    auto* eval_cluster = eval->add_subcommand("cluster", "biased-word cluster purity (tSNE + k-means)");
    eval_cluster->add_option("--embedding", cl_embedding)->required();
    eval_cluster->add_option("--base-embedding", cl_base, "unmitigated embedding")->required();
    eval_cluster->add_option("--analogy-file", cl_analogy, "pair source for b_test")->required();
    eval_cluster->add_option("--subset", cl_subset);
    eval_cluster->add_option("--per-side", cl_per_side);
    eval_cluster->add_option("--samples", cl_cfg.samples);
    eval_cluster->add_option("--sample-size", cl_cfg.sample_size);
    eval_cluster->add_option("--tsne-iterations", cl_cfg.tsne_iterations);
    eval_cluster->add_option("--perplexity", cl_cfg.perplexity);
    eval_cluster->add_option("--seed", cl_cfg.seed);
    eval_cluster->callback([&] {
        const auto biased = biased_from_base(cl_base, cl_analogy, cl_subset, cl_per_side);
        const auto e = fe::load_embedding_file(cl_embedding);
        const auto r = fe::cluster_purity_eval(e, biased, cl_cfg);
        json j = {{"mean_v", r.mean_v},
                  {"std_v", r.std_v},
                  {"mean_homogeneity", r.mean_homogeneity},
                  {"mean_completeness", r.mean_completeness},
                  {"samples", r.samples},
                  {"skipped_words", r.skipped_words}};
        std::cout << j.dump(2) << "\n";
    });

    std::string rc_embedding, rc_base, rc_analogy, rc_subset = "family";
    std::size_t rc_per_side = 2500, rc_train_n = 1000;
    std::uint64_t rc_seed = 0;
    auto* eval_reclassify = eval->add_subcommand("reclassify", "SVM reclassification of biased words");
    eval_reclassify->add_option("--embedding", rc_embedding)->required();
    eval_reclassify->add_option("--base-embedding", rc_base)->required();
    eval_reclassify->add_option("--analogy-file", rc_analogy)->required();
    eval_reclassify->add_option("--subset", rc_subset);
    eval_reclassify->add_option("--per-side", rc_per_side);
    eval_reclassify->add_option("--train-n", rc_train_n);
    eval_reclassify->add_option("--seed", rc_seed);
    eval_reclassify->callback([&] {
        const auto biased = biased_from_base(rc_base, rc_analogy, rc_subset, rc_per_side);
        const auto e = fe::load_embedding_file(rc_embedding);
        const auto r = fe::svm_reclassify(e, biased, rc_train_n, rc_seed);
        json j = {{"accuracy", r.accuracy},
                  {"train_words", r.train_words},
                  {"test_words", r.test_words},
                  {"skipped_words", r.skipped_words}};
        std::cout << j.dump(2) << "\n";
    });

    std::string an_embedding, an_file, an_subset = "family";
    auto* eval_analogy = eval->add_subcommand("analogy", "pair-based analogy error rate");
    eval_analogy->add_option("--embedding", an_embedding)->required();
    eval_analogy->add_option("--file", an_file, "Google-format analogy file")->required();
    eval_analogy->add_option("--subset", an_subset);
    eval_analogy->callback([&] {
        const auto e = fe::load_embedding_file(an_embedding);
        const auto r = fe::family_analogy_suite(e, an_file, an_subset);
        json j = {{"total", r.total},
                  {"correct", r.correct},
                  {"skipped", r.skipped},
                  {"error_rate", r.error_rate},
                  {"empty_evaluation", r.empty_evaluation}};
        std::cout << j.dump(2) << "\n";
    });

    std::string sl_embedding, sl_file;
    auto* eval_simlex = eval->add_subcommand("simlex", "word-similarity Spearman correlation");
    eval_simlex->add_option("--embedding", sl_embedding)->required();
    eval_simlex->add_option("--file", sl_file, "word1 word2 score judgements")->required();
    eval_simlex->callback([&] {
        const auto e = fe::load_embedding_file(sl_embedding);
        const auto r = fe::similarity_eval(e, sl_file);
        json j = {{"r_s", r.r_s},
                  {"p_two_sided", r.p_two_sided},
                  {"pairs_evaluated", r.pairs_evaluated},
                  {"pairs_skipped", r.pairs_skipped}};
        std::cout << j.dump(2) << "\n";
    });

    // pipeline run
    auto* pipeline = app.add_subcommand("pipeline", "declarative comparison grid");
    pipeline->require_subcommand(1);
    std::string pl_config, pl_outdir;
    std::uint64_t pl_seed = 0;
    bool pl_seed_set = false;
    auto* pipeline_run = pipeline->add_subcommand("run", "run a pipeline config");
    pipeline_run->add_option("--config", pl_config, "pipeline JSON")->required();
    pipeline_run->add_option("--output-dir", pl_outdir, "override output directory");
    pipeline_run->add_option("--seed", pl_seed)->each([&](const std::string&) { pl_seed_set = true; });
    pipeline_run->callback([&] {
        fe::PipelineSpec spec = fe::load_pipeline_spec(pl_config);
        if (!pl_outdir.empty()) spec.output_dir = pl_outdir;
        if (pl_seed_set) spec.seed = pl_seed;
        const auto result = fe::run_pipeline(spec);
        std::cout << "comparison report: " << result.comparison_path << "\n";
    });

    // synth make
    auto* synth = app.add_subcommand("synth", "synthetic fixtures");
    synth->require_subcommand(1);
    fe::SynthConfig sy;
    std::string sy_out, sy_names;
    auto* synth_make = synth->add_subcommand("make", "generate a planted-bias annotated corpus");
    synth_make->add_option("--seed", sy.seed);
    synth_make->add_option("--tokens", sy.tokens);
    synth_make->add_option("--bias", sy.bias_strength, "bias strength in [0,1]");
    synth_make->add_option("--out", sy_out, "annotated corpus path")->required();
    synth_make->add_option("--names-csv", sy_names, "also write planted name counts CSV");
    synth_make->callback([&] {
        const auto made = fe::make_synthetic_corpus(sy);
        fe::save_annotated_corpus_file(made.corpus, sy_out);
        if (!sy_names.empty()) {
            std::ofstream nf(sy_names);
            if (!nf) throw fe::DataError("cannot write names CSV: " + sy_names);
            nf << made.names_csv;
        }
        const auto s = fe::corpus_stats(made.corpus);
        std::cout << json{{"documents", made.corpus.size()},
                          {"tokens", s.token_count},
                          {"types", s.type_count}}
                         .dump(2)
                  << "\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const fe::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const fe::DataError& ex) {
        std::cerr << "data error: " << ex.what() << "\n";
        return 3;
    } catch (const fe::NumericError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return 4;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
