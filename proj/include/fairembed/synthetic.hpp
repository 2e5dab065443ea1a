#pragma once

#include <cstdint>
#include <string>

#include "fairembed/intervention.hpp"

namespace fairembed {

struct SynthConfig {
    std::uint64_t seed = 1;
    std::size_t tokens = 1'000'000;  // target size; actual within 1%
    double bias_strength = 1.0;      // 0 = gender assignments uniform, 1 = fully stereotyped
};

struct SyntheticCorpus {
    Corpus corpus;
    std::string names_csv;  // "name,sex,count" rows for the planted name pools
};

// Template-generated annotated corpus planting the stereotype axes:
// first names and pronouns against career/family/art/math/science topic
// vocabularies, gendered family pairs with shared themes, same-context
// confuser words, and a large pool of singleton "stuff" words whose only
// gender signal flows through name/pronoun anchors.
SyntheticCorpus make_synthetic_corpus(const SynthConfig& cfg);

}  // namespace fairembed
