#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fairembed/embedding.hpp"

namespace fairembed {

struct TrainConfig {
    std::size_t dim = 300;
    std::size_t epochs = 5;
    std::size_t window = 5;
    std::size_t negatives = 5;
    std::size_t min_count = 10;
    double learning_rate = 0.025;  // linear decay to 1e-4 of the start
    double subsample = 0.0;        // frequent-word subsampling threshold, 0 = off
    std::uint64_t seed = 1;
    unsigned threads = 0;          // 0 = hardware concurrency (speed mode only)
    bool deterministic = true;     // single-threaded, bit-reproducible
    std::size_t unigram_table_size = 10'000'000;
};

// Lowercase, strip punctuation except underscores and hyphens, split on
// whitespace.
std::vector<std::string> preprocess(const std::string& text);

struct TrainResult {
    Embedding embedding;
    std::vector<double> epoch_losses;  // mean negative-sampling loss per epoch
};

// CBOW with negative sampling over the unigram^0.75 noise distribution.
// Input is one document per line; the returned embedding holds the input
// vectors over the min_count-filtered vocabulary (count-descending order,
// ties lexicographic).
TrainResult train(std::istream& corpus, const TrainConfig& cfg);
TrainResult train_file(const std::string& path, const TrainConfig& cfg);

}  // namespace fairembed
