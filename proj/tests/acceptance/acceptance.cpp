// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <vector>

#include "fairembed/analogy.hpp"
#include "fairembed/clustering.hpp"
#include "fairembed/core.hpp"
#include "fairembed/embedding.hpp"
#include "fairembed/intervention.hpp"
#include "fairembed/names.hpp"
#include "fairembed/similarity.hpp"
#include "fairembed/subspace.hpp"
#include "fairembed/synthetic.hpp"
#include "fairembed/trainer.hpp"
#include "fairembed/weat.hpp"

using namespace fairembed;

namespace {

const std::string kData = FAIREMBED_DATA_DIR;

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// -------------------------------------------------------------------------
// 1. WED math: Prop 1 unit norms and Prop 2 equidistance on random
//    embeddings, d in {10, 50}, 100 runs, < 10 s.
void criterion_wed_math() {
    const auto start = std::chrono::steady_clock::now();
    double worst_norm = 0.0, worst_equidist = 0.0, worst_identity = 0.0;
    Rng rng(20240601);
    for (int run = 0; run < 100; ++run) {
        const std::size_t d = run % 2 == 0 ? 10 : 50;
        const std::size_t n = 24;
        std::vector<std::string> words;
        for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
        Embedding e(Vocabulary(words), d);
        Vec row(d);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& x : row) x = rng.gaussian();
            e.set_row(i, row);
        }
        WedWordSets sets;
        sets.definitional.pairs = {{"w0", "w1"}, {"w2", "w3"}, {"w4", "w5"}};
        sets.equalise = {{"w6", "w7"}, {"w8", "w9"}};
        sets.gender_specific = {"w10"};

        const Embedding out = run_wed(e, sets, WedVariant::Wed40);

        Embedding normalized_in = e;
        normalized_in.normalize_rows();
        const auto b = compute_bias_subspace(normalized_in, sets.definitional,
                                             MinVarianceFraction{0.40});
        std::unordered_set<std::string> treated = {"w10"};
        for (const auto& [m, f] : sets.definitional.pairs) {
            treated.insert(m);
            treated.insert(f);
        }
        for (const auto& [m, f] : sets.equalise) {
            treated.insert(m);
            treated.insert(f);
        }
        for (const auto& pair : sets.equalise) {
            const auto wm = out.vector_of(pair.first);
            const auto wf = out.vector_of(pair.second);
            worst_norm = std::max(worst_norm, std::abs(norm(wm) - 1.0));
            worst_norm = std::max(worst_norm, std::abs(norm(wf) - 1.0));
            const auto state = equalize_state(out, b, pair);
            for (std::size_t i = 0; i < n; ++i) {
                if (treated.count(out.vocab().word(i))) continue;
                const auto ev = out.row(i);
                const double dm = norm(sub(ev, wm));
                const double df = norm(sub(ev, wf));
                worst_equidist = std::max(worst_equidist, std::abs(dm - df));
                worst_identity = std::max(
                    worst_identity, std::abs(dm * dm - (2.0 - 2.0 * dot(ev, state.nu))));
            }
        }
    }
    const double t = elapsed_s(start);
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "WED math: max |norm-1| %.2e, max equidistance gap %.2e, max distance-identity "
                  "gap %.2e, %.1fs",
                  worst_norm, worst_equidist, worst_identity, t);
    report(1, worst_norm < 1e-8 && worst_equidist < 1e-8 && worst_identity < 1e-8 && t < 10.0,
           buf);
}

// -------------------------------------------------------------------------
// 2. Neutralisation: projections of neutralised words onto every basis
//    vector below 1e-8.
void criterion_neutralisation() {
    Rng rng(777);
    double worst = 0.0;
    for (int run = 0; run < 50; ++run) {
        const std::size_t d = 8 + rng.uniform_int(24);
        const std::size_t n = 20;
        std::vector<std::string> words;
        for (std::size_t i = 0; i < n; ++i) words.push_back("w" + std::to_string(i));
        Embedding e(Vocabulary(words), d);
        Vec row(d);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& x : row) x = rng.gaussian();
            e.set_row(i, row);
        }
        DefinitionalPairs pairs{{{"w0", "w1"}, {"w2", "w3"}}};
        const auto b = compute_bias_subspace(e, pairs, FixedK{2});
        std::vector<std::string> neutral;
        for (std::size_t i = 4; i < n; ++i) neutral.push_back(words[i]);
        neutralize(e, b, neutral);
        for (const auto& w : neutral)
            for (const auto& basis_vec : b.basis)
                worst = std::max(worst, std::abs(dot(e.vector_of(w), basis_vec)));
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "neutralisation: max |projection| %.2e", worst);
    report(2, worst < 1e-8, buf);
}

// -------------------------------------------------------------------------
// 3. Hungarian optimality vs exhaustive search, n <= 8, 1000 instances in
//    < 30 s; 2500x2500 real matrix in < 5 min.
void criterion_hungarian() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(4242);
    bool all_optimal = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(7);  // 2..8
        std::vector<std::vector<double>> cost(n, std::vector<double>(n));
        for (auto& r : cost)
            for (auto& c : r) c = static_cast<double>(rng.uniform_int(100));
        const auto got = solve_assignment(cost);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = 1e300;
        do {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) total += cost[i][perm[i]];
            best = std::min(best, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (std::abs(got.total_cost - best) > 1e-9) all_optimal = false;
    }
    const double t_small = elapsed_s(start);

    const auto big_start = std::chrono::steady_clock::now();
    const std::size_t n = 2500;
    std::vector<PlanePoint> males(n), females(n);
    for (std::size_t i = 0; i < n; ++i) {
        males[i] = {1000.0 + rng.uniform() * 1e6, rng.uniform() * 1e4};
        females[i] = {1000.0 + rng.uniform() * 1e6, rng.uniform() * 1e4};
    }
    const auto cost = build_cost_matrix(males, females, AxisTransform::Log1p);
    const auto big = solve_assignment(cost);
    const double t_big = elapsed_s(big_start);

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "Hungarian: 1000 exhaustive checks %s in %.1fs; 2500x2500 cost %.1f in %.1fs",
                  all_optimal ? "all optimal" : "MISMATCH", t_small, big.total_cost, t_big);
    report(3, all_optimal && t_small < 30.0 && t_big < 300.0, buf);
}

// -------------------------------------------------------------------------
// 4. WEAT correctness: MC vs exact within 0.02; antisymmetry exact to 1e-12.
void criterion_weat() {
    Rng rng(99);
    bool ok = true;
    double max_gap = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::string> words;
        for (int i = 0; i < 20; ++i) words.push_back("w" + std::to_string(i));
        Embedding e(Vocabulary(words), 6);
        Vec row(6);
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (auto& x : row) x = rng.gaussian();
            e.set_row(i, row);
        }
        WeatTest t;
        t.targets_x = {"w0", "w1", "w2", "w3"};
        t.targets_y = {"w4", "w5", "w6", "w7"};
        t.attributes_a = {"w8", "w9", "w10"};
        t.attributes_b = {"w11", "w12", "w13"};
        const auto exact = weat_run(t, e, 10000, 1, false);
        const auto mc = weat_run(t, e, 10000, 31 + trial, true);
        if (!exact.exact || mc.exact) ok = false;
        max_gap = std::max(max_gap, std::abs(mc.p_one_sided - exact.p_one_sided));

        WeatTest ts = t;
        std::swap(ts.targets_x, ts.targets_y);
        const auto swapped = weat_run(ts, e, 100, 1, true);
        if (std::abs(swapped.effect_size + exact.effect_size) > 1e-12) ok = false;
        WeatTest ta = t;
        std::swap(ta.attributes_a, ta.attributes_b);
        const auto attr_swapped = weat_run(ta, e, 100, 1, true);
        if (std::abs(attr_swapped.effect_size + exact.effect_size) > 1e-12) ok = false;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "WEAT: max |MC - exact| p gap %.4f, antisymmetry exact", max_gap);
    report(4, ok && max_gap <= 0.02, buf);
}

// -------------------------------------------------------------------------
// 5. CDS statistics: substituted fraction in [0.47, 0.53] at p=0.5 over
//    10,000 documents; exact boundaries; byte-identical reruns.
void criterion_cds() {
    GenderPairLexicon lex({std::vector<std::pair<std::string, std::string>>{{"he", "she"}}});
    Corpus corpus;
    for (int i = 0; i < 10000; ++i) {
        Document d;
        d.id = "doc" + std::to_string(i);
        d.sentences = {{AnnotatedToken{"he", "PRP", NerTag::None, -1},
                        AnnotatedToken{"left", "VBD", NerTag::None, -1}}};
        corpus.push_back(d);
    }
    InterventionConfig cfg;
    cfg.strategy = InterventionStrategy::Substitute;
    cfg.seed = 20240601;

    cfg.substitution_probability = 0.0;
    const bool p0_ok = apply_cds(corpus, lex, cfg) == corpus;

    cfg.substitution_probability = 1.0;
    const auto all = apply_cds(corpus, lex, cfg);
    bool p1_ok = true;
    for (const auto& d : all)
        if (d.sentences[0][0].surface != "she") p1_ok = false;

    cfg.substitution_probability = 0.5;
    const auto half = apply_cds(corpus, lex, cfg);
    std::size_t substituted = 0;
    for (const auto& d : half)
        if (d.sentences[0][0].surface == "she") ++substituted;
    const double fraction = substituted / 10000.0;
    const bool rerun_ok = apply_cds(corpus, lex, cfg) == half;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "CDS: fraction %.4f, p=0 identity %s, p=1 total %s, rerun identical %s",
                  fraction, p0_ok ? "yes" : "NO", p1_ok ? "yes" : "NO", rerun_ok ? "yes" : "NO");
    report(5, fraction >= 0.47 && fraction <= 0.53 && p0_ok && p1_ok && rerun_ok, buf);
}

// -------------------------------------------------------------------------
// 6. CDA frequency symmetry: pair counts exactly equal; document count
//    exactly doubles.
void criterion_cda() {
    const auto lex = load_lexicon_file(kData + "/lu_pairs.tsv");
    SynthConfig sc;
    sc.seed = 5;
    sc.tokens = 60000;
    const auto made = make_synthetic_corpus(sc);
    InterventionConfig cfg;
    cfg.mode = InterventionMode::Naive;
    const auto augmented = apply_cda(made.corpus, lex, cfg);

    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& d : augmented)
        for (const auto& s : d.sentences)
            for (const auto& t : s) {
                std::string lower = t.surface;
                for (auto& c : lower)
                    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                ++counts[lower];
            }
    bool symmetric = true;
    std::size_t checked = 0;
    for (const auto& [a, b] : lex.pairs()) {
        const std::size_t ca = counts.count(a) ? counts.at(a) : 0;
        const std::size_t cb = counts.count(b) ? counts.at(b) : 0;
        if (ca != cb) symmetric = false;
        if (ca > 0) ++checked;
    }
    const bool doubled = augmented.size() == 2 * made.corpus.size();
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "CDA: %zu lexicon pairs present, counts %s, documents %zu -> %zu",
                  checked, symmetric ? "exactly equal" : "UNEQUAL", made.corpus.size(),
                  augmented.size());
    report(6, symmetric && doubled && checked > 10, buf);
}

// -------------------------------------------------------------------------
// 7. V-measure matches the independent entropy oracle to 1e-10 on 1000
//    random labelings.
void criterion_vmeasure() {
    Rng rng(17);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(60);
        std::vector<std::size_t> pred(n), gold(n);
        const std::size_t kp = 1 + rng.uniform_int(5), kg = 1 + rng.uniform_int(5);
        for (auto& v : pred) v = rng.uniform_int(kp);
        for (auto& v : gold) v = rng.uniform_int(kg);
        const auto got = v_measure(pred, gold);

        // Independent entropy arithmetic.
        const double dn = static_cast<double>(n);
        std::unordered_map<std::size_t, double> pc, gc;
        std::map<std::pair<std::size_t, std::size_t>, double> joint;
        for (std::size_t i = 0; i < n; ++i) {
            pc[pred[i]] += 1.0;
            gc[gold[i]] += 1.0;
            joint[{gold[i], pred[i]}] += 1.0;
        }
        auto entropy = [&](const std::unordered_map<std::size_t, double>& m) {
            double h = 0.0;
            for (const auto& [_, c] : m) h -= (c / dn) * std::log(c / dn);
            return h;
        };
        const double hg = entropy(gc), hp = entropy(pc);
        double hgp = 0.0, hpg = 0.0;
        for (const auto& [key, c] : joint) {
            hgp -= (c / dn) * std::log(c / pc.at(key.second));
            hpg -= (c / dn) * std::log(c / gc.at(key.first));
        }
        const double h = hg == 0.0 ? 1.0 : 1.0 - hgp / hg;
        const double cm = hp == 0.0 ? 1.0 : 1.0 - hpg / hp;
        const double v = h + cm == 0.0 ? 0.0 : 2.0 * h * cm / (h + cm);
        worst = std::max(worst, std::abs(got.v_measure - v));
    }
    const auto perfect = v_measure({3, 3, 9, 9}, {0, 0, 1, 1});
    const auto single = v_measure({0, 0, 0, 0}, {0, 0, 1, 1});
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "V-measure: max oracle gap %.2e, perfect %.3f, single-cluster %.3f", worst,
                  perfect.v_measure, single.v_measure);
    report(7, worst < 1e-10 && perfect.v_measure == 1.0 && single.v_measure == 0.0, buf);
}

// -------------------------------------------------------------------------
// 9. Grammar golden transformations.
void criterion_grammar() {
    GenderPairLexicon lex({std::vector<std::pair<std::string, std::string>>{
        {"man", "woman"}, {"he", "she"}, {"him", "her"}, {"his", "hers"}, {"king", "queen"}}});
    auto tk = [](std::string s, std::string pos, NerTag ner = NerTag::None,
                 std::int32_t chain = -1) {
        return AnnotatedToken{std::move(s), std::move(pos), ner, chain};
    };
    auto surfaces = [](const Document& d) {
        std::vector<std::string> out;
        for (const auto& s : d.sentences)
            for (const auto& t : s) out.push_back(t.surface);
        return out;
    };

    bool ok = true;
    {
        Document d;
        d.id = "a";
        d.sentences = {{tk("the", "DT"), tk("woman", "NN"), tk("cleaned", "VBD"), tk("the", "DT"),
                        tk("kitchen", "NN")}};
        InterventionConfig cfg;
        cfg.mode = InterventionMode::Naive;
        if (surfaces(counterfactual_transform(d, lex, cfg)) !=
            std::vector<std::string>{"the", "man", "cleaned", "the", "kitchen"})
            ok = false;
    }
    {
        Document d;
        d.id = "b";
        d.sentences = {{tk("her", "PRP$"), tk("teacher", "NN"), tk("was", "VBD"),
                        tk("proud", "JJ"), tk("of", "IN"), tk("her", "PRP")}};
        InterventionConfig cfg;
        cfg.mode = InterventionMode::Grammar;
        if (surfaces(counterfactual_transform(d, lex, cfg)) !=
            std::vector<std::string>{"his", "teacher", "was", "proud", "of", "him"})
            ok = false;
    }
    {
        Document d;
        d.id = "c";
        d.sentences = {{tk("Elizabeth", "NNP", NerTag::Person, 0), tk("said", "VBD"),
                        tk("she", "PRP", NerTag::None, 0), tk("was", "VBD"),
                        tk("queen", "NN", NerTag::None, 0)}};
        InterventionConfig cfg;
        cfg.mode = InterventionMode::Grammar;
        if (surfaces(counterfactual_transform(d, lex, cfg)) !=
            std::vector<std::string>{"Elizabeth", "said", "she", "was", "queen"})
            ok = false;
    }
    report(9, ok, "grammar rules: naive swap, her/him POS table, coref veto golden tests");
}

// -------------------------------------------------------------------------
// 10. Spearman vs brute-force rank implementation to 1e-10 on 1000 random
//     20-pair instances.
void criterion_spearman() {
    Rng rng(23);
    double worst = 0.0;
    std::size_t evaluated = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 20;
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = static_cast<double>(rng.uniform_int(10));
        for (auto& v : y) v = rng.gaussian();
        bool constant = true;
        for (double v : x)
            if (v != x[0]) constant = false;
        if (constant) continue;
        ++evaluated;
        const auto got = spearman(x, y);

        // Counting-rank oracle.
        auto ranks = [&](const std::vector<double>& v) {
            std::vector<double> r(n);
            for (std::size_t i = 0; i < n; ++i) {
                double less = 0.0, equal = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (v[j] < v[i]) less += 1.0;
                    if (j != i && v[j] == v[i]) equal += 1.0;
                }
                r[i] = 1.0 + less + equal / 2.0;
            }
            return r;
        };
        const auto rx = ranks(x), ry = ranks(y);
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += rx[i];
            my += ry[i];
        }
        mx /= n;
        my /= n;
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sxy += (rx[i] - mx) * (ry[i] - my);
            sxx += (rx[i] - mx) * (rx[i] - mx);
            syy += (ry[i] - my) * (ry[i] - my);
        }
        worst = std::max(worst, std::abs(got.r_s - sxy / std::sqrt(sxx * syy)));
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "Spearman: %zu instances, max oracle gap %.2e", evaluated,
                  worst);
    report(10, worst < 1e-10 && evaluated > 900, buf);
}

// -------------------------------------------------------------------------
// 11. tSNE + k-means sanity: planted blobs recover purity 1.0; KL
//     non-increasing after early exaggeration.
void criterion_tsne() {
    Rng rng(31);
    const std::size_t per = 60, dim = 10;
    std::vector<double> data;
    for (std::size_t i = 0; i < 2 * per; ++i) {
        const double offset = i < per ? 7.0 : -7.0;
        for (std::size_t j = 0; j < dim; ++j)
            data.push_back(rng.gaussian() + (j == 0 ? offset : 0.0));
    }
    const auto projected = tsne_2d(data, 2 * per, dim, 20.0, 800, 3);
    const auto clusters = kmeans(projected.points, 2 * per, 2, 2, 5, 10);

    std::size_t agree = 0;
    for (std::size_t flip = 0; flip < 2; ++flip) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < clusters.labels.size(); ++i) {
            const std::size_t expected = (i < per) == (flip == 0) ? 0 : 1;
            if (clusters.labels[i] == expected) ++count;
        }
        agree = std::max(agree, count);
    }
    const double purity = static_cast<double>(agree) / (2.0 * per);

    bool monotone = true;
    for (std::size_t i = projected.exaggeration_end + 1; i < projected.kl_history.size(); ++i)
        if (projected.kl_history[i] > projected.kl_history[i - 1] + 1e-9) monotone = false;

    char buf[128];
    std::snprintf(buf, sizeof(buf), "tSNE+k-means: blob purity %.3f, post-exaggeration KL %s",
                  purity, monotone ? "non-increasing" : "INCREASED");
    report(11, purity == 1.0 && monotone, buf);
}

// -------------------------------------------------------------------------
// 8. End-to-end directional reproduction at desk scale.
void criterion_end_to_end() {
    const auto start = std::chrono::steady_clock::now();

    SynthConfig sc;
    sc.seed = 3;
    sc.tokens = 1'000'000;
    sc.bias_strength = 1.0;
    const auto made = make_synthetic_corpus(sc);

    auto train_corpus = [&](const Corpus& corpus) {
        std::ostringstream text;
        write_training_text(corpus, text);
        TrainConfig cfg;
        cfg.dim = 32;
        cfg.epochs = 5;
        cfg.min_count = 10;
        cfg.seed = 1;
        std::istringstream in(text.str());
        return train(in, cfg).embedding;
    };

    const Embedding base = train_corpus(made.corpus);

    std::istringstream csv(made.names_csv);
    const auto pairing = match_names(load_name_table(csv), 24);
    const auto lexicon = load_lexicon_file(kData + "/lu_pairs.tsv");
    InterventionConfig icfg;
    icfg.mode = InterventionMode::Names;
    icfg.strategy = InterventionStrategy::Substitute;
    icfg.seed = 42;
    icfg.pairing = &pairing;
    const Embedding ncds = train_corpus(apply_cds(made.corpus, lexicon, icfg));

    WedWordSets sets;
    sets.definitional.pairs = load_pair_file(kData + "/definitional.tsv");
    sets.equalise = load_pair_file(kData + "/equalise.tsv");
    sets.gender_specific = load_word_set(kData + "/gender_specific.txt");
    const Embedding wed40 = run_wed(base, sets, WedVariant::Wed40);

    // (a) + (b): careers-family WEAT.
    const auto weat_test = load_weat_test(kData + "/weat/careers_family.json");
    const auto weat_base = weat_run(weat_test, base, 10000, 7);
    const auto weat_ncds = weat_run(weat_test, ncds, 10000, 7);
    const bool a_ok = weat_base.effect_size > 1.0 && weat_base.p_one_sided < 0.05;
    const bool b_ok = std::abs(weat_ncds.effect_size) < 0.5;

    // (c): biased-word cluster purity, selection on the unmitigated space.
    const auto rows = load_analogy_section(kData + "/family_analogies.txt", "family");
    const auto family_pairs = analogy_section_pairs(rows);
    const auto direction = bias_direction(base, family_pairs);
    const auto biased = select_biased_words(base, direction, 300);
    ClusterEvalConfig ccfg;
    ccfg.sample_size = 200;
    ccfg.samples = 30;
    ccfg.seed = 11;
    ccfg.tsne_iterations = 400;
    const auto cluster_base = cluster_purity_eval(base, biased, ccfg);
    const auto cluster_ncds = cluster_purity_eval(ncds, biased, ccfg);
    const bool c_ok = cluster_ncds.mean_v < 0.70 * cluster_base.mean_v;

    // (d): family analogy error rates.
    const auto analogy_base = run_analogy_suite(base, rows);
    const auto analogy_ncds = run_analogy_suite(ncds, rows);
    const auto analogy_wed = run_analogy_suite(wed40, rows);
    const bool d_ok = analogy_ncds.error_rate <= analogy_base.error_rate &&
                      analogy_wed.error_rate > analogy_base.error_rate;

    const double t = elapsed_s(start);
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "end-to-end: none d=%.2f p=%.2e | nCDS |d|=%.2f | V none=%.3f nCDS=%.3f "
                  "(%.0f%% drop) | analogy err none=%.1f%% nCDS=%.1f%% WED40=%.1f%% | %.0fs",
                  weat_base.effect_size, weat_base.p_one_sided,
                  std::abs(weat_ncds.effect_size), cluster_base.mean_v, cluster_ncds.mean_v,
                  100.0 * (1.0 - cluster_ncds.mean_v / std::max(cluster_base.mean_v, 1e-12)),
                  analogy_base.error_rate, analogy_ncds.error_rate, analogy_wed.error_rate, t);
    report(8, a_ok && b_ok && c_ok && d_ok && t < 900.0, buf);
}

}  // namespace

int main() {
    criterion_wed_math();
    criterion_neutralisation();
    criterion_hungarian();
    criterion_weat();
    criterion_cds();
    criterion_cda();
    criterion_vmeasure();
    criterion_end_to_end();
    criterion_grammar();
    criterion_spearman();
    criterion_tsne();
    if (failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
