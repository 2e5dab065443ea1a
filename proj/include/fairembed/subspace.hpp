#pragma once

#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "fairembed/embedding.hpp"

namespace fairembed {

using WordPair = std::pair<std::string, std::string>;  // (male form, female form)

struct DefinitionalPairs {
    std::vector<WordPair> pairs;
};

// Orthonormal basis of the bias subspace plus the defining spectrum.
struct GenderSubspace {
    std::vector<Vec> basis;          // k orthonormal vectors
    std::vector<double> eigenvalues; // full spectrum, descending
    double variance_fraction = 0.0;  // share of spectrum captured by the basis

    std::size_t k() const { return basis.size(); }
    std::size_t dim() const { return basis.empty() ? 0 : basis.front().size(); }
};

// Either a fixed component count or a minimum cumulative variance share.
struct FixedK {
    std::size_t k;
};
struct MinVarianceFraction {
    double fraction;  // basis size = smallest k with cumulative share > fraction
};
using SubspaceSelector = std::variant<FixedK, MinVarianceFraction>;

struct Decomposition {
    Vec parallel;    // projection onto the bias subspace
    Vec orthogonal;  // remainder
};

struct EqualizeState {
    Vec mu;    // pair mean
    Vec mu_b;  // projection of the mean onto B
    Vec nu;    // mu - mu_b, orthogonal to B
};

// Word sets driving a WED run. `gender_specific` is exempt from
// neutralisation; the neutral set is the vocabulary complement of
// gender_specific plus all pair words.
struct WedWordSets {
    DefinitionalPairs definitional;
    std::vector<WordPair> equalise;
    std::unordered_set<std::string> gender_specific;
};

enum class WedVariant { Wed40, Wed70, NWed70 };

struct WedReport {
    std::size_t subspace_k = 0;
    double variance_fraction = 0.0;
    std::vector<double> eigenvalue_shares;
    std::size_t neutralised_words = 0;
    std::size_t equalised_pairs = 0;
    std::vector<WordPair> skipped_pairs;  // missing from the vocabulary
};

// Average per-pair covariance of the definitional pairs; basis = top-k
// eigenvectors under the selector rule.
GenderSubspace compute_bias_subspace(const Embedding& e, const DefinitionalPairs& pairs,
                                     const SubspaceSelector& selector);

Decomposition decompose(std::span<const double> v, const GenderSubspace& b);

// Replaces each neutral word's vector with its normalized out-of-subspace
// component. Rejects words lying entirely inside B and a basis spanning the
// full space.
void neutralize(Embedding& e, const GenderSubspace& b,
                const std::vector<std::string>& neutral_words);

EqualizeState equalize_state(const Embedding& e, const GenderSubspace& b, const WordPair& pair);

// Rewrites both pair members as nu + sqrt(1-|nu|^2) * unit(w_B - mu_B).
// Results are unit vectors equidistant from every neutralised word.
void equalize(Embedding& e, const GenderSubspace& b, const std::vector<WordPair>& pairs);

// Labels the rest of the vocabulary with a regularized logistic classifier
// trained on the seed sets over unit vectors; returns seeds plus predicted
// gender-specific words. Boundary ties resolve to neutral.
std::unordered_set<std::string> expand_gender_specific(
    const Embedding& e, const std::unordered_set<std::string>& seed_specific,
    const std::unordered_set<std::string>& seed_neutral);

// Full WED pass: unit-normalizes the embedding, computes the subspace at
// the variant's variance threshold (>0.40 / >0.70), neutralises the
// complement of the gender-specific set, equalises the pair list (plus
// `name_pairs` for NWed70). Pairs missing from the vocabulary are skipped
// and reported.
Embedding run_wed(const Embedding& e, const WedWordSets& sets, WedVariant variant,
                  const std::vector<WordPair>& name_pairs = {}, WedReport* report = nullptr);

struct SpectrumReport {
    std::vector<double> definitional_shares;  // descending, sums to 1
    std::vector<double> random_baseline_shares;
};

// Eigenvalue shares of the definitional covariance next to a matched
// random-unit-pair baseline.
SpectrumReport variance_explained(const DefinitionalPairs& pairs, const Embedding& e,
                                  std::uint64_t baseline_seed = 1);

// File formats: word-per-line sets, TSV "male<TAB>female" pair lists.
std::vector<WordPair> load_pair_file(const std::string& path);
std::unordered_set<std::string> load_word_set(const std::string& path);

}  // namespace fairembed
