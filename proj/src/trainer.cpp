#include "fairembed/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "fairembed/core.hpp"
#include "fairembed/intervention.hpp"

namespace fairembed {

std::vector<std::string> preprocess(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            const std::string cleaned = clean_token(current);
            if (!cleaned.empty()) tokens.push_back(cleaned);
            current.clear();
        }
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)))
            flush();
        else
            current.push_back(c);
    }
    flush();
    return tokens;
}

namespace {

struct CorpusIndex {
    std::vector<std::string> vocab_words;            // count desc, ties lexicographic
    std::vector<std::uint64_t> counts;               // aligned with vocab_words
    std::vector<std::vector<std::uint32_t>> lines;   // documents as word ids
    std::uint64_t total_tokens = 0;                  // in-vocabulary tokens
};

CorpusIndex index_corpus(std::istream& corpus, const TrainConfig& cfg) {
    std::vector<std::vector<std::string>> raw_lines;
    std::unordered_map<std::string, std::uint64_t> counts;
    std::string line;
    while (std::getline(corpus, line)) {
        raw_lines.push_back(preprocess(line));
        for (const auto& t : raw_lines.back()) ++counts[t];
    }

    CorpusIndex idx;
    for (const auto& [word, count] : counts)
        if (count >= cfg.min_count) idx.vocab_words.push_back(word);
    if (idx.vocab_words.empty())
        throw DataError("training corpus empty after min_count filtering");
    std::sort(idx.vocab_words.begin(), idx.vocab_words.end(),
              [&](const std::string& a, const std::string& b) {
                  const auto ca = counts.at(a), cb = counts.at(b);
                  if (ca != cb) return ca > cb;
                  return a < b;
              });
    std::unordered_map<std::string, std::uint32_t> word_id;
    word_id.reserve(idx.vocab_words.size());
    for (std::uint32_t i = 0; i < idx.vocab_words.size(); ++i) word_id.emplace(idx.vocab_words[i], i);
    idx.counts.reserve(idx.vocab_words.size());
    for (const auto& w : idx.vocab_words) idx.counts.push_back(counts.at(w));

    idx.lines.reserve(raw_lines.size());
    for (const auto& tokens : raw_lines) {
        std::vector<std::uint32_t> ids;
        ids.reserve(tokens.size());
        for (const auto& t : tokens) {
            auto it = word_id.find(t);
            if (it != word_id.end()) ids.push_back(it->second);
        }
        idx.total_tokens += ids.size();
        if (!ids.empty()) idx.lines.push_back(std::move(ids));
    }
    return idx;
}

std::vector<std::uint32_t> build_unigram_table(const std::vector<std::uint64_t>& counts,
                                               std::size_t table_size) {
    std::vector<std::uint32_t> table(table_size);
    double total = 0.0;
    for (auto c : counts) total += std::pow(static_cast<double>(c), 0.75);
    std::size_t word = 0;
    double cumulative = std::pow(static_cast<double>(counts[0]), 0.75) / total;
    for (std::size_t slot = 0; slot < table_size; ++slot) {
        table[slot] = static_cast<std::uint32_t>(word);
        if (static_cast<double>(slot + 1) / table_size > cumulative && word + 1 < counts.size()) {
            ++word;
            cumulative += std::pow(static_cast<double>(counts[word]), 0.75) / total;
        }
    }
    return table;
}

inline double sigmoid(double x) {
    if (x > 6.0) return 1.0;
    if (x < -6.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
}

// One pass over a span of lines. Shared weights; in speed mode concurrent
// updates race benignly as in reference word2vec.
void train_lines(const CorpusIndex& idx, const TrainConfig& cfg, std::size_t line_begin,
                 std::size_t line_end, std::vector<float>& syn0, std::vector<float>& syn1,
                 const std::vector<std::uint32_t>& noise_table, Rng& rng,
                 std::atomic<std::uint64_t>& processed, std::uint64_t total_work,
                 double& loss_sum, std::uint64_t& loss_terms) {
    const std::size_t dim = cfg.dim;
    std::vector<double> hidden(dim), grad(dim);
    std::uint64_t local_processed = 0;

    for (std::size_t li = line_begin; li < line_end; ++li) {
        const auto& sentence = idx.lines[li];
        for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
            const std::uint32_t target = sentence[pos];
            if (cfg.subsample > 0.0) {
                const double freq =
                    static_cast<double>(idx.counts[target]) / idx.total_tokens;
                const double keep = (std::sqrt(freq / cfg.subsample) + 1.0) * cfg.subsample / freq;
                if (keep < 1.0 && rng.uniform() >= keep) continue;
            }
            // Reduced window, uniform in [1, window].
            const std::size_t win = 1 + static_cast<std::size_t>(rng.uniform_int(cfg.window));
            std::fill(hidden.begin(), hidden.end(), 0.0);
            std::size_t context_count = 0;
            const std::size_t lo = pos >= win ? pos - win : 0;
            const std::size_t hi = std::min(sentence.size(), pos + win + 1);
            for (std::size_t c = lo; c < hi; ++c) {
                if (c == pos) continue;
                const float* row = syn0.data() + static_cast<std::size_t>(sentence[c]) * dim;
                for (std::size_t j = 0; j < dim; ++j) hidden[j] += row[j];
                ++context_count;
            }
            if (context_count == 0) continue;
            for (auto& h : hidden) h /= static_cast<double>(context_count);

            const double progress =
                static_cast<double>(processed.load(std::memory_order_relaxed) + local_processed) /
                static_cast<double>(total_work + 1);
            const double alpha =
                std::max(cfg.learning_rate * (1.0 - progress), cfg.learning_rate * 1e-4);

            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t s = 0; s <= cfg.negatives; ++s) {
                std::uint32_t sample;
                double label;
                if (s == 0) {
                    sample = target;
                    label = 1.0;
                } else {
                    sample = noise_table[rng.uniform_int(noise_table.size())];
                    if (sample == target) continue;
                    label = 0.0;
                }
                float* out_row = syn1.data() + static_cast<std::size_t>(sample) * dim;
                double f = 0.0;
                for (std::size_t j = 0; j < dim; ++j) f += hidden[j] * out_row[j];
                const double sig = sigmoid(f);
                const double g = (label - sig) * alpha;
                loss_sum -= label > 0.5 ? std::log(std::max(sig, 1e-12))
                                        : std::log(std::max(1.0 - sig, 1e-12));
                ++loss_terms;
                for (std::size_t j = 0; j < dim; ++j) {
                    grad[j] += g * out_row[j];
                    out_row[j] += static_cast<float>(g * hidden[j]);
                }
            }
            for (std::size_t c = lo; c < hi; ++c) {
                if (c == pos) continue;
                float* row = syn0.data() + static_cast<std::size_t>(sentence[c]) * dim;
                for (std::size_t j = 0; j < dim; ++j) row[j] += static_cast<float>(grad[j]);
            }
            ++local_processed;
        }
        if (local_processed >= 4096) {
            processed.fetch_add(local_processed, std::memory_order_relaxed);
            local_processed = 0;
        }
    }
    processed.fetch_add(local_processed, std::memory_order_relaxed);
}

}  // namespace

TrainResult train(std::istream& corpus, const TrainConfig& cfg) {
    if (cfg.dim < 2) throw ConfigError("trainer: dim must be at least 2");
    if (cfg.epochs == 0 || cfg.window == 0) throw ConfigError("trainer: epochs and window must be positive");

    const CorpusIndex idx = index_corpus(corpus, cfg);
    const std::size_t vocab_size = idx.vocab_words.size();
    const std::size_t dim = cfg.dim;

    std::vector<float> syn0(vocab_size * dim);
    std::vector<float> syn1(vocab_size * dim, 0.0f);
    Rng init_rng(cfg.seed);
    for (auto& w : syn0)
        w = static_cast<float>((init_rng.uniform() - 0.5) / static_cast<double>(dim));

    const std::size_t table_size =
        std::max<std::size_t>(std::min(cfg.unigram_table_size, std::size_t{100'000'000}), 1000);
    const auto noise_table = build_unigram_table(idx.counts, table_size);

    const std::uint64_t total_work = idx.total_tokens * cfg.epochs;
    std::atomic<std::uint64_t> processed{0};
    TrainResult result;

    const unsigned threads =
        cfg.deterministic ? 1u
                          : (cfg.threads == 0
                                 ? std::max(1u, std::thread::hardware_concurrency())
                                 : cfg.threads);

    std::vector<Rng> rngs;
    for (unsigned t = 0; t < threads; ++t)
        rngs.emplace_back(derive_seed(cfg.seed, "epoch-thread-" + std::to_string(t)));

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<double> loss_sums(threads, 0.0);
        std::vector<std::uint64_t> loss_counts(threads, 0);
        if (threads == 1) {
            train_lines(idx, cfg, 0, idx.lines.size(), syn0, syn1, noise_table, rngs[0],
                        processed, total_work, loss_sums[0], loss_counts[0]);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (idx.lines.size() + threads - 1) / threads;
            for (unsigned t = 0; t < threads; ++t) {
                const std::size_t begin = std::min<std::size_t>(t * chunk, idx.lines.size());
                const std::size_t end = std::min<std::size_t>(begin + chunk, idx.lines.size());
                pool.emplace_back([&, t, begin, end] {
                    train_lines(idx, cfg, begin, end, syn0, syn1, noise_table, rngs[t], processed,
                                total_work, loss_sums[t], loss_counts[t]);
                });
            }
            for (auto& th : pool) th.join();
        }
        double total_loss = 0.0;
        std::uint64_t total_terms = 0;
        for (unsigned t = 0; t < threads; ++t) {
            total_loss += loss_sums[t];
            total_terms += loss_counts[t];
        }
        result.epoch_losses.push_back(total_terms == 0 ? 0.0 : total_loss / total_terms);
    }

    Vocabulary vocab(idx.vocab_words);
    Embedding e(std::move(vocab), dim);
    Vec row(dim);
    for (std::size_t i = 0; i < vocab_size; ++i) {
        for (std::size_t j = 0; j < dim; ++j) row[j] = static_cast<double>(syn0[i * dim + j]);
        e.set_row(i, row);
    }
    result.embedding = std::move(e);
    return result;
}

TrainResult train_file(const std::string& path, const TrainConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open training text: " + path);
    return train(in, cfg);
}

}  // namespace fairembed
