#include "fairembed/intervention.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fairembed/core.hpp"

namespace fairembed {

namespace {

std::string to_lower(const std::string& s) {
    std::string out = s;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_all_caps(const std::string& s) {
    std::size_t alpha = 0;
    for (unsigned char c : s) {
        if (std::isalpha(c)) {
            if (!std::isupper(c)) return false;
            ++alpha;
        }
    }
    return alpha >= 2;
}

// Leading-character case mirroring; all-caps originals map to all-caps.
std::string mirror_case(std::string replacement, const std::string& original) {
    if (original.empty() || replacement.empty()) return replacement;
    if (is_all_caps(original)) {
        for (auto& c : replacement) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return replacement;
    }
    const unsigned char lead = static_cast<unsigned char>(original[0]);
    if (std::isupper(lead))
        replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
    else
        replacement[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(replacement[0])));
    return replacement;
}

const char* ner_name(NerTag t) {
    switch (t) {
        case NerTag::Person: return "PERSON";
        case NerTag::Other: return "OTHER";
        default: return "NONE";
    }
}

NerTag parse_ner(const std::string& s) {
    if (s == "PERSON") return NerTag::Person;
    if (s == "OTHER") return NerTag::Other;
    if (s == "NONE" || s.empty()) return NerTag::None;
    throw DataError("unknown NER tag: " + s);
}

// POS-disambiguated pronoun swaps for grammar and names modes.
const std::string* pronoun_pos_swap(const std::string& lower, const std::string& pos) {
    static const std::string him = "him", his = "his", her = "her";
    if (lower == "her" && pos == "PRP") return &him;
    if (lower == "her" && pos == "PRP$") return &his;
    if (lower == "his" && pos == "PRP$") return &her;
    if (lower == "him" && pos == "PRP") return &her;
    return nullptr;
}

}  // namespace

GenderPairLexicon::GenderPairLexicon(std::vector<std::pair<std::string, std::string>> pairs)
    : pairs_(std::move(pairs)) {
    for (const auto& [a, b] : pairs_) {
        if (a == b) throw DataError("lexicon pair maps word to itself: " + a);
        if (!lookup_.emplace(a, b).second || !lookup_.emplace(b, a).second)
            throw DataError("word appears in more than one lexicon pair: " + a + "/" + b);
    }
}

const std::string* GenderPairLexicon::counterpart(const std::string& lowercase_surface) const {
    auto it = lookup_.find(lowercase_surface);
    return it == lookup_.end() ? nullptr : &it->second;
}

GenderPairLexicon load_lexicon_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon file: " + path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected a<TAB>b");
        pairs.emplace_back(to_lower(line.substr(0, tab)), to_lower(line.substr(tab + 1)));
    }
    return GenderPairLexicon(std::move(pairs));
}

Corpus load_annotated_corpus(std::istream& in) {
    Corpus corpus;
    Document* doc = nullptr;
    Sentence sentence;
    std::string line;
    std::size_t lineno = 0;

    auto flush_sentence = [&] {
        if (!sentence.empty()) {
            if (!doc) throw DataError("token before any #doc header");
            doc->sentences.push_back(std::move(sentence));
            sentence.clear();
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("#doc ", 0) == 0) {
            flush_sentence();
            corpus.emplace_back();
            doc = &corpus.back();
            doc->id = line.substr(5);
            if (doc->id.empty())
                throw DataError("line " + std::to_string(lineno) + ": #doc with empty id");
            continue;
        }
        if (line.empty()) {
            flush_sentence();
            continue;
        }
        if (!doc) throw DataError("line " + std::to_string(lineno) + ": token before #doc header");
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 4)
            throw DataError("line " + std::to_string(lineno) + ": expected 4 tab-separated fields, got " +
                            std::to_string(fields.size()));
        AnnotatedToken tok;
        tok.surface = fields[0];
        if (tok.surface.empty()) throw DataError("line " + std::to_string(lineno) + ": empty surface");
        tok.pos = fields[1];
        tok.ner = parse_ner(fields[2]);
        if (fields[3].empty()) {
            tok.coref_chain = -1;
        } else {
            try {
                tok.coref_chain = std::stoi(fields[3]);
            } catch (const std::exception&) {
                throw DataError("line " + std::to_string(lineno) + ": bad coref id '" + fields[3] + "'");
            }
        }
        sentence.push_back(std::move(tok));
    }
    flush_sentence();
    return corpus;
}

Corpus load_annotated_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);
    return load_annotated_corpus(in);
}

void save_annotated_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& doc : corpus) {
        out << "#doc " << doc.id << '\n';
        bool first = true;
        for (const auto& sent : doc.sentences) {
            if (!first) out << '\n';
            first = false;
            for (const auto& tok : sent) {
                out << tok.surface << '\t' << tok.pos << '\t' << ner_name(tok.ner) << '\t';
                if (tok.coref_chain >= 0) out << tok.coref_chain;
                out << '\n';
            }
        }
        out << '\n';
    }
}

void save_annotated_corpus_file(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write corpus file: " + path);
    save_annotated_corpus(corpus, out);
}

Document counterfactual_transform(const Document& d, const GenderPairLexicon& lex,
                                  const InterventionConfig& cfg) {
    if (cfg.mode == InterventionMode::Names && cfg.pairing == nullptr)
        throw ConfigError("names intervention requires a name pairing");

    // Grammar mode vetoes swaps in chains that corefer to a proper noun.
    std::unordered_set<std::int32_t> vetoed_chains;
    if (cfg.mode == InterventionMode::Grammar) {
        for (const auto& sent : d.sentences)
            for (const auto& tok : sent)
                if (tok.coref_chain >= 0 && (tok.pos == "NNP" || tok.pos == "NNPS"))
                    vetoed_chains.insert(tok.coref_chain);
    }

    Document out;
    out.id = d.id;
    out.sentences.reserve(d.sentences.size());
    for (const auto& sent : d.sentences) {
        Sentence new_sent;
        new_sent.reserve(sent.size());
        for (const auto& tok : sent) {
            AnnotatedToken nt = tok;
            // Name swap first: the NER gate takes precedence over the
            // lexicon when a word is both.
            if (cfg.mode == InterventionMode::Names && tok.ner == NerTag::Person) {
                if (const std::string* paired = cfg.pairing->counterpart(titlecase(tok.surface))) {
                    nt.surface = mirror_case(*paired, tok.surface);
                    new_sent.push_back(std::move(nt));
                    continue;
                }
            }
            const std::string lower = to_lower(tok.surface);
            const std::string* replacement = nullptr;
            if (cfg.mode != InterventionMode::Naive)
                replacement = pronoun_pos_swap(lower, tok.pos);
            if (!replacement) replacement = lex.counterpart(lower);
            if (replacement) {
                const bool vetoed = cfg.mode == InterventionMode::Grammar &&
                                    tok.coref_chain >= 0 && vetoed_chains.count(tok.coref_chain);
                if (!vetoed) nt.surface = mirror_case(*replacement, tok.surface);
            }
            new_sent.push_back(std::move(nt));
        }
        out.sentences.push_back(std::move(new_sent));
    }
    return out;
}

Corpus apply_cda(const Corpus& corpus, const GenderPairLexicon& lex,
                 const InterventionConfig& cfg) {
    Corpus out = corpus;
    out.reserve(corpus.size() * 2);
    std::vector<Document> copies(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) {
        copies[i] = counterfactual_transform(corpus[i], lex, cfg);
        copies[i].id += "~cf";
    });
    for (auto& c : copies) out.push_back(std::move(c));
    return out;
}

Corpus apply_cds(const Corpus& corpus, const GenderPairLexicon& lex,
                 const InterventionConfig& cfg) {
    const double p = cfg.substitution_probability;
    if (p < 0.0 || p > 1.0) throw ConfigError("substitution probability must lie in [0, 1]");
    Corpus out(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) {
        // The draw depends only on (seed, doc id), never on scheduling.
        const double u =
            static_cast<double>(derive_seed(cfg.seed, corpus[i].id) >> 11) * 0x1.0p-53;
        out[i] = u < p ? counterfactual_transform(corpus[i], lex, cfg) : corpus[i];
    });
    return out;
}

namespace {

bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '\'' || c >= 0x80;
}

const std::unordered_set<std::string>& closed_class_words() {
    static const std::unordered_set<std::string> words = {
        "the", "a",    "an",   "and",  "or",   "but",  "of",   "in",    "on",   "at",
        "to",  "for",  "with", "by",   "from", "is",   "was",  "are",   "were", "be",
        "been", "being", "as",  "that", "this", "it",   "he",   "she",   "they", "we",
        "you", "i",    "not",  "no",   "so",   "if",   "then", "than",  "had",  "has",
        "have", "did", "do",   "does", "will", "would", "can",  "could", "said"};
    return words;
}

}  // namespace

Corpus heuristic_annotate(std::istream& raw_text, const NamePairing& gazetteer) {
    Corpus corpus;
    std::string line;
    std::vector<std::string> doc_lines;
    std::size_t doc_index = 0;

    auto annotate_doc = [&](const std::vector<std::string>& lines) {
        Document doc;
        doc.id = "doc" + std::to_string(doc_index++);
        Sentence sentence;
        std::vector<std::string> raw_tokens;
        for (const auto& l : lines) {
            std::size_t i = 0;
            while (i < l.size()) {
                const unsigned char c = static_cast<unsigned char>(l[i]);
                if (std::isspace(c)) {
                    ++i;
                    continue;
                }
                if (is_word_char(c)) {
                    std::size_t j = i;
                    while (j < l.size() && is_word_char(static_cast<unsigned char>(l[j]))) ++j;
                    raw_tokens.push_back(l.substr(i, j - i));
                    i = j;
                } else {
                    raw_tokens.push_back(std::string(1, l[i]));
                    ++i;
                }
            }
        }
        auto flush_sentence = [&] {
            if (!sentence.empty()) {
                doc.sentences.push_back(std::move(sentence));
                sentence.clear();
            }
        };
        for (std::size_t t = 0; t < raw_tokens.size(); ++t) {
            const std::string& surface = raw_tokens[t];
            AnnotatedToken tok;
            tok.surface = surface;
            const unsigned char lead = static_cast<unsigned char>(surface[0]);
            const std::string lower = to_lower(surface);
            if (!std::isalnum(lead) && surface.size() == 1) {
                tok.pos = surface;
            } else if (lower == "he" || lower == "she" || lower == "him" || lower == "hers") {
                tok.pos = "PRP";
            } else if (lower == "his") {
                tok.pos = "PRP$";
            } else if (lower == "her") {
                // Possessive iff followed by something noun-like.
                const bool has_next = t + 1 < raw_tokens.size();
                bool possessive = false;
                if (has_next) {
                    const std::string next = to_lower(raw_tokens[t + 1]);
                    const bool next_is_word =
                        std::isalpha(static_cast<unsigned char>(raw_tokens[t + 1][0]));
                    possessive = next_is_word && !closed_class_words().count(next);
                }
                tok.pos = possessive ? "PRP$" : "PRP";
            } else if (std::isupper(lead) && gazetteer.contains(titlecase(surface))) {
                tok.pos = "NNP";
                tok.ner = NerTag::Person;
            } else {
                tok.pos = "NN";
            }
            const bool sentence_end = surface == "." || surface == "!" || surface == "?";
            sentence.push_back(std::move(tok));
            if (sentence_end) flush_sentence();
        }
        flush_sentence();
        if (!doc.sentences.empty()) corpus.push_back(std::move(doc));
    };

    while (std::getline(raw_text, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (!doc_lines.empty()) {
                annotate_doc(doc_lines);
                doc_lines.clear();
            }
        } else {
            doc_lines.push_back(line);
        }
    }
    if (!doc_lines.empty()) annotate_doc(doc_lines);
    return corpus;
}

CorpusStats corpus_stats(const Corpus& corpus) {
    std::unordered_map<std::string, std::uint64_t> counts;
    std::uint64_t tokens = 0;
    for (const auto& doc : corpus)
        for (const auto& sent : doc.sentences)
            for (const auto& tok : sent) {
                ++counts[tok.surface];
                ++tokens;
            }
    CorpusStats stats;
    stats.type_count = counts.size();
    stats.token_count = tokens;
    stats.type_token_ratio = tokens == 0 ? 0.0 : static_cast<double>(counts.size()) / tokens;
    std::size_t even = 0;
    for (const auto& [_, c] : counts)
        if (c % 2 == 0) ++even;
    stats.even_frequency_fraction =
        counts.empty() ? 0.0 : static_cast<double>(even) / counts.size();
    return stats;
}

std::string clean_token(const std::string& surface) {
    std::string out;
    out.reserve(surface.size());
    for (unsigned char c : surface) {
        if (std::isalnum(c)) {
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (c == '_' || c == '-') {
            out.push_back(static_cast<char>(c));
        } else if (c >= 0x80) {
            out.push_back(static_cast<char>(c));  // keep non-ASCII bytes as-is
        }
    }
    return out;
}

void write_training_text(const Corpus& corpus, std::ostream& out) {
    for (const auto& doc : corpus) {
        bool first = true;
        for (const auto& sent : doc.sentences) {
            for (const auto& tok : sent) {
                const std::string cleaned = clean_token(tok.surface);
                if (cleaned.empty()) continue;
                if (!first) out << ' ';
                out << cleaned;
                first = false;
            }
        }
        out << '\n';
    }
}

void write_training_text_file(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write training text: " + path);
    write_training_text(corpus, out);
}

}  // namespace fairembed
