#include "fairembed/synthetic.hpp"

#include <array>
#include <cstdio>
#include <sstream>
#include <vector>

#include "fairembed/core.hpp"
#include "fairembed/names.hpp"

namespace fairembed {

namespace {

const std::array<const char*, 24> kMaleNames = {
    "John",    "Paul",   "Mike",    "Kevin",  "Steve",   "Greg",    "Jeff",    "Bill",
    "James",   "Robert", "Michael", "William", "David",  "Richard", "Joseph",  "Thomas",
    "Charles", "Daniel", "Matthew", "Anthony", "Mark",   "Donald",  "Kenneth", "Brian"};

const std::array<const char*, 24> kFemaleNames = {
    "Amy",      "Joan",   "Lisa",     "Sarah",  "Diana",    "Kate",     "Ann",    "Donna",
    "Mary",     "Patricia", "Jennifer", "Linda", "Elizabeth", "Barbara", "Susan",  "Jessica",
    "Karen",    "Nancy",  "Margaret", "Carol",  "Michelle", "Emily",    "Laura",  "Ruth"};

const std::array<const char*, 8> kCareerWords = {"executive", "management", "professional",
                                                 "corporation", "salary", "office", "business",
                                                 "career"};
const std::array<const char*, 8> kFamilyWords = {"home",     "parents", "children", "family",
                                                 "cousins",  "marriage", "wedding", "relatives"};
const std::array<const char*, 8> kMathWords = {"math",      "algebra",     "geometry", "calculus",
                                               "equations", "computation", "numbers",  "addition"};
const std::array<const char*, 8> kArtWords = {"poetry", "art",   "dance", "literature",
                                              "novel",  "symphony", "drama", "sculpture"};
const std::array<const char*, 8> kScienceWords = {"science",    "technology", "physics",
                                                  "chemistry",  "Einstein",   "NASA",
                                                  "experiment", "astronomy"};
// Extra art-side words so the arts-sciences target list resolves too.
const std::array<const char*, 2> kExtraArtWords = {"Shakespeare", "ballad"};

// Gendered pair themes. Pairs sharing a household share theme words;
// per-side extras give each member a small non-gender signature. The
// confuser, when set, is a gender-neutral synonym generated from the male
// template verbatim.
struct PairTheme {
    const char* male;
    const char* female;
    std::array<const char*, 3> theme;
    const char* male_extra;
    const char* female_extra;
    const char* confuser;  // nullptr = none
};

const std::array<PairTheme, 23> kPairThemes = {{
    {"boy", "girl", {"school", "playground", "lesson"}, "kite", "ribbon", nullptr},
    {"brother", "sister", {"twin", "chores", "quarrel"}, "slingshot", "locket", nullptr},
    {"brothers", "sisters", {"bunkroom", "errands", "racket"}, "marbles", "bracelets", nullptr},
    {"dad", "mom", {"supper", "minivan", "curfew"}, "toolbox", "apron", nullptr},
    {"father", "mother", {"household", "ledgered", "counsel"}, "ledger", "shawl", nullptr},
    {"grandfather", "grandmother", {"porch", "heirloom", "orchardhouse"}, "pipe", "knitting", nullptr},
    {"grandpa", "grandma", {"rocking", "cottage", "jam"}, "checkers", "cookies", nullptr},
    {"grandson", "granddaughter", {"visitday", "postcard", "allowance"}, "sled", "doll", nullptr},
    {"groom", "bride", {"vows", "ceremony", "devoted"}, "cufflinks", "bouquet", "newlywed"},
    {"husband", "wife", {"anniversary", "mortgage", "porchlight"}, "razor", "perfume", nullptr},
    {"king", "queen", {"royal", "palace", "crown"}, "scepter", "tiara", nullptr},
    {"man", "woman", {"town", "market", "work"}, "boots", "scarf", nullptr},
    {"nephew", "niece", {"gifts", "mischief", "sleepover"}, "whistle", "beads", nullptr},
    {"policeman", "policewoman", {"patrol", "precinct", "badge"}, "nightstick", "notebook", "cop"},
    {"prince", "princess", {"castle", "pageant", "heirship"}, "sword", "gown", nullptr},
    {"son", "daughter", {"cradle", "tuition", "pride"}, "wagon", "pony", nullptr},
    {"sons", "daughters", {"yard", "benches", "recital"}, "kites", "ponies", nullptr},
    {"stepbrother", "stepsister", {"attic", "carpool", "bickering"}, "skates", "diary", "sibling"},
    {"stepfather", "stepmother", {"manor", "remarriage", "stairs"}, "cane", "brooch", "guardian"},
    {"stepson", "stepdaughter", {"orchard", "homework", "bedtime"}, "drum", "flute", "stepchild"},
    {"uncle", "aunt", {"holiday", "roadtrip", "parcel"}, "tobacco", "teapot", nullptr},
    // Extra coverage so every definitional pair occurs in the corpus;
    // these two are not part of the family analogy set.
    {"guy", "gal", {"diner", "bowling", "jukebox"}, "cap", "sandals", nullptr},
    {"male", "female", {"census", "registry", "record"}, "beard", "braid", nullptr},
}};

const std::array<const char*, 24> kNeutralNouns = {
    "river",  "mill",   "road",   "bridge", "harbor", "garden", "tower",   "valley",
    "meadow", "lantern", "wagonway", "cellar", "orchardgate", "fence", "chimney", "barn",
    "creek",  "plaza",  "alley",  "forge",  "quarry", "dock",   "granary", "hedge"};

// Deterministic gender streams per document type. Independent Bernoulli
// draws would leave binomial imbalance in the attribute words' gender
// exposure, which the standardized WEAT statistic amplifies into spurious
// near-maximal effects at zero planted bias.
enum class Stream : std::size_t {
    Career, Family, Math, Art, ExtraArt, Science, StuffM, StuffF, Confuser, Newsletter, Count
};

struct Builder {
    Rng rng;
    double bias;
    Corpus corpus;
    std::size_t tokens = 0;
    std::size_t next_id = 0;
    std::array<double, static_cast<std::size_t>(Stream::Count)> acc{};
    // Per-stream, per-gender attribute rotation: every attribute word
    // meets male and female documents in exactly equal counts.
    std::array<std::array<std::size_t, 2>, static_cast<std::size_t>(Stream::Count)> attr_cursor{};
    std::size_t male_cursor = 0, female_cursor = 0;

    const char* next_attr(Stream stream, bool male, const char* const* attrs, std::size_t n) {
        std::size_t& c = attr_cursor[static_cast<std::size_t>(stream)][male ? 0 : 1];
        return attrs[c++ % n];
    }

    explicit Builder(std::uint64_t seed, double bias_strength)
        : rng(seed), bias(bias_strength) {}

    // True = male, emitted at the exact long-run rate (1 +- bias) / 2.
    bool draw_gender(Stream stream, bool stereo_male) {
        const double p_male = stream == Stream::Newsletter
                                  ? 0.5
                                  : (stereo_male ? 0.5 + bias / 2.0 : 0.5 - bias / 2.0);
        double& a = acc[static_cast<std::size_t>(stream)];
        a += p_male;
        if (a >= 1.0 - 1e-12) {
            a -= 1.0;
            return true;
        }
        return false;
    }

    AnnotatedToken tok(std::string surface, std::string pos, NerTag ner = NerTag::None,
                       std::int32_t chain = -1) {
        return AnnotatedToken{std::move(surface), std::move(pos), ner, chain};
    }

    const char* pick(const char* const* pool, std::size_t n) {
        return pool[rng.uniform_int(n)];
    }

    // Round-robin keeps the per-name shares of each topic exactly equal.
    std::string pick_name(bool male) {
        return male ? kMaleNames[male_cursor++ % kMaleNames.size()]
                    : kFemaleNames[female_cursor++ % kFemaleNames.size()];
    }

    // Random within gender: the per-name incidental counts carry noise on
    // purpose while the gender-attribute margins stay exact.
    std::string random_name(bool male) {
        return male ? kMaleNames[rng.uniform_int(kMaleNames.size())]
                    : kFemaleNames[rng.uniform_int(kFemaleNames.size())];
    }

    void push(Document doc) {
        for (const auto& s : doc.sentences) tokens += s.size();
        doc.id = "synth-" + std::to_string(next_id++);
        corpus.push_back(std::move(doc));
    }

    // Anchors each name to two signature words of its own, with no
    // pronouns: idiosyncratic context mass on top of the shared gender
    // axis, as real names have.
    void flavor_doc(std::size_t name_index) {
        const bool male = name_index < kMaleNames.size();
        const std::string name =
            male ? kMaleNames[name_index] : kFemaleNames[name_index - kMaleNames.size()];
        char buf_a[16], buf_b[16];
        std::snprintf(buf_a, sizeof(buf_a), "flavora%02zu", name_index);
        std::snprintf(buf_b, sizeof(buf_b), "flavorb%02zu", name_index);
        Document d;
        Sentence s1, s2;
        s1.push_back(tok(name, "NNP", NerTag::Person, 0));
        s1.push_back(tok("lived", "VBD"));
        s1.push_back(tok("near", "IN"));
        s1.push_back(tok("the", "DT"));
        s1.push_back(tok(buf_a, "NN"));
        s1.push_back(tok(".", "."));
        s2.push_back(tok(name, "NNP", NerTag::Person, 0));
        s2.push_back(tok("kept", "VBD"));
        s2.push_back(tok("a", "DT"));
        s2.push_back(tok(buf_b, "NN"));
        s2.push_back(tok(".", "."));
        d.sentences.push_back(std::move(s1));
        d.sentences.push_back(std::move(s2));
        push(std::move(d));
    }

    // Gender-balanced incidental contact between names and topic words;
    // the per-name Poisson noise here is what keeps WEAT effect sizes
    // finite when no bias is planted.
    // Sparse planted affinities: per (gender, attribute), a fixed subset
    // of names carries the incidental contact. Exact gender-attribute
    // margins, strongly idiosyncratic per-name profiles; this population
    // spread is what keeps WEAT effect sizes finite when the topic
    // assignment itself carries no bias.
    std::vector<std::array<std::size_t, 5>> newsletter_names;  // [2 * attr + male] -> name indices

    void init_newsletters() {
        const std::size_t n_attrs = kCareerWords.size() + kFamilyWords.size();
        Rng wrng(derive_seed(rng.next_u64(), "newsletter-affinity"));
        newsletter_names.resize(2 * n_attrs);
        // Shuffled round-robin per gender: every name lands in a few
        // attribute slots, no name is left without incidental contact.
        for (std::size_t g = 0; g < 2; ++g) {
            std::vector<std::size_t> order;
            std::size_t used = order.size();
            for (std::size_t k = 0; k < n_attrs; ++k) {
                auto& slot = newsletter_names[2 * k + g];
                for (auto& idx : slot) {
                    if (used == order.size()) {
                        order.resize(kMaleNames.size());
                        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                            const std::size_t j = i + wrng.uniform_int(order.size() - i);
                            std::swap(order[i], order[j]);
                        }
                        used = 0;
                    }
                    idx = order[used++];
                }
            }
        }
    }

    void newsletter_doc() {
        const bool male = draw_gender(Stream::Newsletter, true);  // exact 50/50 at any bias
        std::size_t& c = attr_cursor[static_cast<std::size_t>(Stream::Newsletter)][male ? 0 : 1];
        const std::size_t n_attrs = kCareerWords.size() + kFamilyWords.size();
        const std::size_t i = c++ % n_attrs;
        const char* attr = i < kCareerWords.size() ? kCareerWords[i]
                                                   : kFamilyWords[i - kCareerWords.size()];
        const auto& allowed = newsletter_names[2 * i + (male ? 1 : 0)];
        const std::size_t name_idx = allowed[rng.uniform_int(allowed.size())];
        const std::string name = male ? kMaleNames[name_idx] : kFemaleNames[name_idx];
        // Attribute adjacent to the name (deterministic contact); the
        // doubled name adds a self column so the planted affinity reaches
        // the measured name-attribute cosine directly.
        Document d;
        Sentence s;
        s.push_back(tok(name, "NNP", NerTag::Person, 0));
        s.push_back(tok(attr, "NN"));
        s.push_back(tok("said", "VBD"));
        s.push_back(tok(name, "NNP", NerTag::Person, 0));
        s.push_back(tok("today", "RB"));
        s.push_back(tok(".", "."));
        d.sentences.push_back(std::move(s));
        push(std::move(d));
    }

    // "<subject> said <pron> liked the <stuff> ." The subject is usually
    // a pronoun; names front only a sliver of these documents, keeping
    // their embedding-side gender coupling mild the way real first names'
    // is.
    std::size_t stuff_doc_counter = 0;

    void stuff_doc(const std::string& stuff_word, bool stereo_male) {
        const bool male = draw_gender(stereo_male ? Stream::StuffM : Stream::StuffF, stereo_male);
        const bool with_name = stuff_doc_counter++ % 7 == 0;
        Document d;
        Sentence s;
        if (with_name)
            s.push_back(tok(random_name(male), "NNP", NerTag::Person, 0));
        else
            s.push_back(tok(male ? "he" : "she", "PRP", NerTag::None, 0));
        s.push_back(tok("said", "VBD"));
        s.push_back(tok(male ? "he" : "she", "PRP", NerTag::None, 0));
        s.push_back(tok("liked", "VBD"));
        s.push_back(tok("the", "DT"));
        s.push_back(tok(stuff_word, "NN"));
        s.push_back(tok(".", "."));
        d.sentences.push_back(std::move(s));
        push(std::move(d));
    }

    // Topic document: attribute words sit directly after a first name, so
    // every attribute occurrence contributes exactly one name contact (no
    // window-coverage coin flips) and the planted association is
    // first-order in the name-attribute cosine.
    void topic_doc(Stream stream, const char* const* attrs, std::size_t n_attrs,
                   bool stereo_male) {
        const bool male = draw_gender(stream, stereo_male);
        Document d;
        Sentence s1, s2;
        s1.push_back(tok(random_name(male), "NNP", NerTag::Person, 0));
        s1.push_back(tok(next_attr(stream, male, attrs, n_attrs), "NN"));
        s1.push_back(tok("joined", "VBD"));
        s1.push_back(tok("the", "DT"));
        s1.push_back(tok("crew", "NN"));
        s1.push_back(tok(".", "."));
        s2.push_back(tok(random_name(male), "NNP", NerTag::Person, 1));
        s2.push_back(tok(next_attr(stream, male, attrs, n_attrs), "NN"));
        s2.push_back(tok("kept", "VBD"));
        s2.push_back(tok("the", "DT"));
        s2.push_back(tok("crew", "NN"));
        s2.push_back(tok(".", "."));
        d.sentences.push_back(std::move(s1));
        d.sentences.push_back(std::move(s2));
        push(std::move(d));
    }

    // Pronoun-only topic sentence (art/math/science axes).
    void pronoun_topic_doc(Stream stream, const char* const* attrs, std::size_t n_attrs,
                           bool stereo_male) {
        const bool male = draw_gender(stream, stereo_male);
        Document d;
        Sentence s;
        s.push_back(tok(male ? "he" : "she", "PRP"));
        s.push_back(tok("said", "VBD"));
        s.push_back(tok(male ? "his" : "her", "PRP$"));
        s.push_back(tok("favorite", "JJ"));
        s.push_back(tok(next_attr(stream, male, attrs, n_attrs), "NN"));
        s.push_back(tok("was", "VBD"));
        s.push_back(tok("the", "DT"));
        s.push_back(tok(next_attr(stream, male, attrs, n_attrs), "NN"));
        s.push_back(tok(".", "."));
        d.sentences.push_back(std::move(s));
        push(std::move(d));
    }

    // Gendered family-pair document; word and pronouns share a chain.
    void pair_doc(const PairTheme& p, bool male_side) {
        Document d;
        Sentence s1, s2;
        const char* w = male_side ? p.male : p.female;
        s1.push_back(tok("the", "DT"));
        s1.push_back(tok(w, "NN", NerTag::None, 0));
        s1.push_back(tok("admired", "VBD"));
        s1.push_back(tok("the", "DT"));
        s1.push_back(tok(p.theme[0], "NN"));
        s1.push_back(tok(p.theme[1], "NN"));
        s1.push_back(tok(".", "."));
        s2.push_back(tok("the", "DT"));
        s2.push_back(tok(w, "NN", NerTag::None, 0));
        s2.push_back(tok("kept", "VBD"));
        s2.push_back(tok(male_side ? "his" : "her", "PRP$", NerTag::None, 0));
        s2.push_back(tok(male_side ? p.male_extra : p.female_extra, "NN"));
        s2.push_back(tok("near", "IN"));
        s2.push_back(tok("the", "DT"));
        s2.push_back(tok(p.theme[2], "NN"));
        s2.push_back(tok(".", "."));
        d.sentences.push_back(std::move(s1));
        d.sentences.push_back(std::move(s2));
        // himself/herself coverage rides on the man/woman theme.
        if (std::string(p.male) == "man") {
            Sentence s3;
            s3.push_back(tok("the", "DT"));
            s3.push_back(tok(w, "NN", NerTag::None, 0));
            s3.push_back(tok("kept", "VBD"));
            s3.push_back(tok("it", "PRP"));
            s3.push_back(tok("for", "IN"));
            s3.push_back(tok(male_side ? "himself" : "herself", "PRP", NerTag::None, 0));
            s3.push_back(tok(".", "."));
            d.sentences.push_back(std::move(s3));
        }
        push(std::move(d));
    }

    // Same template as the male pair doc, with the neutral confuser in
    // the gendered word's slot.
    void confuser_doc(const PairTheme& p) {
        const bool male = draw_gender(Stream::Confuser, true);
        Document d;
        Sentence s1, s2;
        s1.push_back(tok("the", "DT"));
        s1.push_back(tok(p.confuser, "NN", NerTag::None, 0));
        s1.push_back(tok("admired", "VBD"));
        s1.push_back(tok("the", "DT"));
        s1.push_back(tok(p.theme[0], "NN"));
        s1.push_back(tok(p.theme[1], "NN"));
        s1.push_back(tok(".", "."));
        s2.push_back(tok("the", "DT"));
        s2.push_back(tok(p.confuser, "NN", NerTag::None, 0));
        s2.push_back(tok("kept", "VBD"));
        s2.push_back(tok(male ? "his" : "her", "PRP$", NerTag::None, 0));
        s2.push_back(tok(p.male_extra, "NN"));
        s2.push_back(tok("near", "IN"));
        s2.push_back(tok("the", "DT"));
        s2.push_back(tok(p.theme[2], "NN"));
        s2.push_back(tok(".", "."));
        d.sentences.push_back(std::move(s1));
        d.sentences.push_back(std::move(s2));
        push(std::move(d));
    }

    void filler_doc() {
        Document d;
        Sentence s;
        s.push_back(tok("the", "DT"));
        s.push_back(tok(pick(kNeutralNouns.data(), kNeutralNouns.size()), "NN"));
        s.push_back(tok("faced", "VBD"));
        s.push_back(tok("the", "DT"));
        s.push_back(tok(pick(kNeutralNouns.data(), kNeutralNouns.size()), "NN"));
        s.push_back(tok(".", "."));
        d.sentences.push_back(std::move(s));
        push(std::move(d));
    }
};

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SynthConfig& cfg) {
    if (cfg.tokens < 10'000) throw ConfigError("synthetic corpus: need at least 10^4 tokens");
    if (cfg.bias_strength < 0.0 || cfg.bias_strength > 1.0)
        throw ConfigError("synthetic corpus: bias strength must lie in [0, 1]");

    constexpr std::size_t kStuffPerSide = 260;
    std::vector<std::string> stuff_m, stuff_f;
    for (std::size_t i = 0; i < kStuffPerSide; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%03zu", i);
        stuff_m.push_back("stuffm" + std::string(buf));
        stuff_f.push_back("stufff" + std::string(buf));
    }

    Builder b(cfg.seed, cfg.bias_strength);
    b.init_newsletters();
    std::size_t pair_cursor = 0, confuser_cursor = 0, stuff_cursor = 0;
    std::vector<const PairTheme*> confuser_pairs;
    for (const auto& p : kPairThemes)
        if (p.confuser) confuser_pairs.push_back(&p);

    std::size_t flavor_cursor = 0;
    while (b.tokens < cfg.tokens) {
        const double roll = b.rng.uniform();
        if (roll < 0.42) {
            // Round-robin over stuff words keeps every type above min_count.
            const std::size_t i = stuff_cursor++ % (2 * kStuffPerSide);
            const bool male_pool = i < kStuffPerSide;
            const std::string& w = male_pool ? stuff_m[i] : stuff_f[i - kStuffPerSide];
            b.stuff_doc(w, male_pool);
        } else if (roll < 0.61) {
            const std::size_t i = pair_cursor++;
            b.pair_doc(kPairThemes[i % kPairThemes.size()],
                       (i / kPairThemes.size()) % 2 == 0);
        } else if (roll < 0.67) {
            b.topic_doc(Stream::Career, kCareerWords.data(), kCareerWords.size(), true);
        } else if (roll < 0.73) {
            b.topic_doc(Stream::Family, kFamilyWords.data(), kFamilyWords.size(), false);
        } else if (roll < 0.7425) {
            b.pronoun_topic_doc(Stream::Math, kMathWords.data(), kMathWords.size(), true);
        } else if (roll < 0.755) {
            b.pronoun_topic_doc(Stream::Art, kArtWords.data(), kArtWords.size(), false);
        } else if (roll < 0.7675) {
            b.pronoun_topic_doc(Stream::ExtraArt, kExtraArtWords.data(), kExtraArtWords.size(),
                                false);
        } else if (roll < 0.78) {
            b.pronoun_topic_doc(Stream::Science, kScienceWords.data(), kScienceWords.size(), true);
        } else if (roll < 0.90) {
            b.flavor_doc(flavor_cursor++ % (kMaleNames.size() + kFemaleNames.size()));
        } else if (roll < 0.96) {
            b.newsletter_doc();
        } else if (roll < 0.985) {
            b.confuser_doc(*confuser_pairs[confuser_cursor++ % confuser_pairs.size()]);
        } else {
            b.filler_doc();
        }
    }

    SyntheticCorpus out;
    out.corpus = std::move(b.corpus);

    // Name-count rows mirroring the pools: strongly gender-specific,
    // frequency falling with rank, a little deterministic jitter.
    std::ostringstream csv;
    csv << "name,sex,count\n";
    Rng jitter(derive_seed(cfg.seed, "name-counts"));
    for (std::size_t i = 0; i < kMaleNames.size(); ++i) {
        const std::uint64_t major = 90000 - 3000 * i + jitter.uniform_int(500);
        const std::uint64_t minor = 40 + jitter.uniform_int(60);
        csv << kMaleNames[i] << ",M," << major << "\n";
        csv << kMaleNames[i] << ",F," << minor << "\n";
    }
    for (std::size_t i = 0; i < kFemaleNames.size(); ++i) {
        const std::uint64_t major = 88000 - 2950 * i + jitter.uniform_int(500);
        const std::uint64_t minor = 40 + jitter.uniform_int(60);
        csv << kFemaleNames[i] << ",F," << major << "\n";
        csv << kFemaleNames[i] << ",M," << minor << "\n";
    }
    out.names_csv = csv.str();
    return out;
}

}  // namespace fairembed
