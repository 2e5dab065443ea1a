#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fairembed/names.hpp"

namespace fairembed {

enum class NerTag : std::uint8_t { None, Person, Other };

struct AnnotatedToken {
    std::string surface;
    std::string pos;              // Penn-style tag
    NerTag ner = NerTag::None;
    std::int32_t coref_chain = -1;  // -1 = not in a chain

    bool operator==(const AnnotatedToken&) const = default;
};

using Sentence = std::vector<AnnotatedToken>;

struct Document {
    std::string id;
    std::vector<Sentence> sentences;

    bool operator==(const Document&) const = default;
};

using Corpus = std::vector<Document>;

// Bidirectional lowercase gendered word pairs (Lu et al.-style list).
class GenderPairLexicon {
public:
    GenderPairLexicon() = default;
    explicit GenderPairLexicon(std::vector<std::pair<std::string, std::string>> pairs);

    const std::string* counterpart(const std::string& lowercase_surface) const;
    bool contains(const std::string& lowercase_surface) const {
        return lookup_.count(lowercase_surface) != 0;
    }
    std::size_t size() const { return pairs_.size(); }
    const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

private:
    std::vector<std::pair<std::string, std::string>> pairs_;
    std::unordered_map<std::string, std::string> lookup_;
};

GenderPairLexicon load_lexicon_file(const std::string& path);

enum class InterventionMode { Naive, Grammar, Names };
enum class InterventionStrategy { Augment, Substitute };

struct InterventionConfig {
    InterventionMode mode = InterventionMode::Naive;
    InterventionStrategy strategy = InterventionStrategy::Augment;
    double substitution_probability = 0.5;
    std::uint64_t seed = 0;
    const NamePairing* pairing = nullptr;  // required for Names mode
};

// Annotated corpus format: "#doc <id>" header, one token per line
// "surface<TAB>pos<TAB>ner<TAB>coref", blank line between sentences.
Corpus load_annotated_corpus(std::istream& in);
Corpus load_annotated_corpus_file(const std::string& path);
void save_annotated_corpus(const Corpus& corpus, std::ostream& out);
void save_annotated_corpus_file(const Corpus& corpus, const std::string& path);

// Gender-swaps one document according to the configured mode. Pure; the
// CDS coin flip lives in apply_cds.
Document counterfactual_transform(const Document& d, const GenderPairLexicon& lex,
                                  const InterventionConfig& cfg);

// Original documents followed by transformed copies (ids suffixed "~cf").
Corpus apply_cda(const Corpus& corpus, const GenderPairLexicon& lex, const InterventionConfig& cfg);

// Per-document Bernoulli(p) substitution with a draw derived from
// (seed, doc id); output order and size match the input.
Corpus apply_cds(const Corpus& corpus, const GenderPairLexicon& lex, const InterventionConfig& cfg);

// Best-effort annotation for raw text: blank-line separated documents,
// gazetteer-gated PERSON tags, the her/PRP$ heuristic, no coref chains.
Corpus heuristic_annotate(std::istream& raw_text, const NamePairing& gazetteer);

struct CorpusStats {
    std::size_t type_count = 0;
    std::size_t token_count = 0;
    double type_token_ratio = 0.0;
    double even_frequency_fraction = 0.0;
};

CorpusStats corpus_stats(const Corpus& corpus);

// One document per line, lowercased, punctuation other than underscores
// and hyphens stripped.
void write_training_text(const Corpus& corpus, std::ostream& out);
void write_training_text_file(const Corpus& corpus, const std::string& path);
std::string clean_token(const std::string& surface);

}  // namespace fairembed
