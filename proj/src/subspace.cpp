#include "fairembed/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fairembed/core.hpp"

namespace fairembed {

namespace {

SymMatrix pair_covariance(const Embedding& e, const std::vector<WordPair>& pairs) {
    if (pairs.empty()) throw DataError("no definitional pairs given");
    const std::size_t d = e.dim();
    SymMatrix c(d);
    double total_diff = 0.0;
    for (const auto& [male, female] : pairs) {
        const auto wm = e.vector_of(male);
        const auto wf = e.vector_of(female);
        // Per-pair mean; each member contributes (w - mu)(w - mu)^T / |D_i|.
        Vec mu(d);
        for (std::size_t j = 0; j < d; ++j) mu[j] = 0.5 * (wm[j] + wf[j]);
        for (const auto& w : {wm, wf}) {
            Vec diff(d);
            for (std::size_t j = 0; j < d; ++j) diff[j] = w[j] - mu[j];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) c.at(i, j) += 0.5 * diff[i] * diff[j];
            total_diff += dot(diff, diff);
        }
    }
    if (total_diff == 0.0)
        throw NumericError("degenerate covariance: all definitional pairs identical");
    return c;
}

std::size_t select_k(const std::vector<double>& values, const SubspaceSelector& selector) {
    if (std::holds_alternative<FixedK>(selector)) {
        const std::size_t k = std::get<FixedK>(selector).k;
        if (k == 0 || k > values.size()) throw ConfigError("subspace k out of range");
        return k;
    }
    const double f = std::get<MinVarianceFraction>(selector).fraction;
    if (f < 0.0 || f >= 1.0) throw ConfigError("variance fraction must lie in [0, 1)");
    double total = 0.0;
    for (double v : values) total += std::max(v, 0.0);
    if (total <= 0.0) throw NumericError("degenerate spectrum");
    double cum = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        cum += std::max(values[k], 0.0);
        // Smallest k whose cumulative share strictly exceeds the threshold.
        if (cum / total > f) return k + 1;
    }
    return values.size();
}

}  // namespace

GenderSubspace compute_bias_subspace(const Embedding& e, const DefinitionalPairs& pairs,
                                     const SubspaceSelector& selector) {
    const SymMatrix c = pair_covariance(e, pairs.pairs);
    EigenResult eig = symmetric_eigen(c);
    const std::size_t k = select_k(eig.values, selector);

    GenderSubspace out;
    out.eigenvalues = eig.values;
    out.basis.assign(eig.vectors.begin(), eig.vectors.begin() + static_cast<std::ptrdiff_t>(k));
    double total = 0.0, kept = 0.0;
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
        const double v = std::max(eig.values[i], 0.0);
        total += v;
        if (i < k) kept += v;
    }
    out.variance_fraction = total > 0.0 ? kept / total : 0.0;
    return out;
}

Decomposition decompose(std::span<const double> v, const GenderSubspace& b) {
    if (b.basis.empty()) throw ConfigError("empty subspace basis");
    if (v.size() != b.dim()) throw DataError("decompose: dimension mismatch");
    Decomposition out;
    out.parallel.assign(v.size(), 0.0);
    for (const auto& basis_vec : b.basis) axpy(dot(v, basis_vec), basis_vec, out.parallel);
    out.orthogonal = sub(v, out.parallel);
    return out;
}

void neutralize(Embedding& e, const GenderSubspace& b,
                const std::vector<std::string>& neutral_words) {
    if (b.k() >= e.dim())
        throw NumericError("bias subspace spans the full space; nothing can be neutralised");
    for (const auto& w : neutral_words) {
        const auto v = e.vector_of(w);
        Decomposition d = decompose(v, b);
        const double n = norm(d.orthogonal);
        if (n < 1e-12)
            throw NumericError("word lies entirely in the bias subspace: " + w);
        const auto i = *e.find(w);
        for (auto& x : d.orthogonal) x /= n;
        e.set_row(i, d.orthogonal);
    }
}

EqualizeState equalize_state(const Embedding& e, const GenderSubspace& b, const WordPair& pair) {
    const auto wm = e.vector_of(pair.first);
    const auto wf = e.vector_of(pair.second);
    EqualizeState s;
    s.mu.resize(e.dim());
    for (std::size_t j = 0; j < e.dim(); ++j) s.mu[j] = 0.5 * (wm[j] + wf[j]);
    Decomposition d = decompose(s.mu, b);
    s.mu_b = std::move(d.parallel);
    s.nu = std::move(d.orthogonal);
    return s;
}

void equalize(Embedding& e, const GenderSubspace& b, const std::vector<WordPair>& pairs) {
    for (const auto& pair : pairs) {
        const EqualizeState s = equalize_state(e, b, pair);
        const double nu_norm = norm(s.nu);
        if (nu_norm > 1.0 + 1e-12)
            throw NumericError("equalize: |nu| > 1 for pair " + pair.first + "/" + pair.second +
                               " (embedding not unit-normalized?)");
        const double radius = std::sqrt(std::max(0.0, 1.0 - nu_norm * nu_norm));
        for (const auto& w : {pair.first, pair.second}) {
            const Decomposition d = decompose(e.vector_of(w), b);
            Vec dir = sub(d.parallel, s.mu_b);
            const double dn = norm(dir);
            if (dn < 1e-12)
                throw NumericError("equalize: w_B equals mu_B for word " + w);
            Vec out = s.nu;
            axpy(radius / dn, dir, out);
            e.set_row(*e.find(w), out);
        }
    }
}

std::unordered_set<std::string> expand_gender_specific(
    const Embedding& e, const std::unordered_set<std::string>& seed_specific,
    const std::unordered_set<std::string>& seed_neutral) {
    std::vector<std::size_t> rows;
    std::vector<double> labels;
    for (const auto& w : seed_specific) {
        auto i = e.find(w);
        if (!i) throw DataError("expansion seed not in vocabulary: " + w);
        if (seed_neutral.count(w)) throw DataError("seed in both classes: " + w);
        rows.push_back(*i);
        labels.push_back(1.0);
    }
    for (const auto& w : seed_neutral) {
        auto i = e.find(w);
        if (!i) throw DataError("expansion seed not in vocabulary: " + w);
        rows.push_back(*i);
        labels.push_back(0.0);
    }
    const std::size_t n_specific = seed_specific.size();
    if (n_specific < 2 || rows.size() - n_specific < 2)
        throw DataError("expansion needs at least 2 seeds per class");

    const std::size_t d = e.dim();
    const auto& unit = e.unit_rows();

    // L2-regularized logistic regression, full-batch gradient descent.
    // Deterministic and plenty for a few hundred seed examples.
    Vec w(d, 0.0);
    double bias = 0.0;
    const double lambda = 1e-3;
    const double lr = 1.0;
    const std::size_t n = rows.size();
    for (int iter = 0; iter < 500; ++iter) {
        Vec grad(d, 0.0);
        double grad_b = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double* x = unit.data() + rows[s] * d;
            double z = bias;
            for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double err = p - labels[s];
            for (std::size_t j = 0; j < d; ++j) grad[j] += err * x[j];
            grad_b += err;
        }
        for (std::size_t j = 0; j < d; ++j) w[j] = w[j] - lr * (grad[j] / n + lambda * w[j]);
        bias -= lr * grad_b / n;
    }

    std::unordered_set<std::string> result = seed_specific;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string& word = e.vocab().word(i);
        if (seed_specific.count(word) || seed_neutral.count(word)) continue;
        const double* x = unit.data() + i * d;
        double z = bias;
        for (std::size_t j = 0; j < d; ++j) z += w[j] * x[j];
        // Decision threshold 0.5 <=> z > 0; exact boundary stays neutral.
        if (z > 0.0) result.insert(word);
    }
    return result;
}

Embedding run_wed(const Embedding& e, const WedWordSets& sets, WedVariant variant,
                  const std::vector<WordPair>& name_pairs, WedReport* report) {
    Embedding out = e;
    out.normalize_rows();

    const double threshold = variant == WedVariant::Wed40 ? 0.40 : 0.70;
    const GenderSubspace b =
        compute_bias_subspace(out, sets.definitional, MinVarianceFraction{threshold});

    std::vector<WordPair> equalise = sets.equalise;
    if (variant == WedVariant::NWed70)
        equalise.insert(equalise.end(), name_pairs.begin(), name_pairs.end());

    // Gender-specific words, pair words included, are exempt from
    // neutralisation; everything else is neutral.
    std::unordered_set<std::string> specific = sets.gender_specific;
    for (const auto& [m, f] : sets.definitional.pairs) {
        specific.insert(m);
        specific.insert(f);
    }
    for (const auto& [m, f] : equalise) {
        specific.insert(m);
        specific.insert(f);
    }

    std::vector<std::string> neutral;
    neutral.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!specific.count(out.vocab().word(i))) neutral.push_back(out.vocab().word(i));
    neutralize(out, b, neutral);

    std::vector<WordPair> present, skipped;
    for (const auto& p : equalise) {
        if (out.find(p.first) && out.find(p.second))
            present.push_back(p);
        else
            skipped.push_back(p);
    }
    equalize(out, b, present);

    if (report) {
        report->subspace_k = b.k();
        report->variance_fraction = b.variance_fraction;
        double total = 0.0;
        for (double v : b.eigenvalues) total += std::max(v, 0.0);
        report->eigenvalue_shares.clear();
        for (double v : b.eigenvalues)
            report->eigenvalue_shares.push_back(total > 0.0 ? std::max(v, 0.0) / total : 0.0);
        report->neutralised_words = neutral.size();
        report->equalised_pairs = present.size();
        report->skipped_pairs = std::move(skipped);
    }
    return out;
}

SpectrumReport variance_explained(const DefinitionalPairs& pairs, const Embedding& e,
                                  std::uint64_t baseline_seed) {
    const SymMatrix c = pair_covariance(e, pairs.pairs);
    EigenResult eig = symmetric_eigen(c);

    SpectrumReport out;
    double total = 0.0;
    for (double v : eig.values) total += std::max(v, 0.0);
    if (total <= 0.0) throw NumericError("degenerate spectrum");
    for (double v : eig.values) out.definitional_shares.push_back(std::max(v, 0.0) / total);

    // Matched baseline: same number of pairs, random unit vectors.
    const std::size_t d = e.dim();
    Rng rng(baseline_seed);
    auto random_unit = [&] {
        Vec v(d);
        for (auto& x : v) x = rng.gaussian();
        return normalized(v);
    };
    SymMatrix cb(d);
    for (std::size_t p = 0; p < pairs.pairs.size(); ++p) {
        const Vec a = random_unit();
        const Vec b = random_unit();
        Vec diff(d);
        for (std::size_t j = 0; j < d; ++j) diff[j] = 0.5 * (a[j] - b[j]);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) cb.at(i, j) += diff[i] * diff[j];
    }
    EigenResult eigb = symmetric_eigen(cb);
    double totalb = 0.0;
    for (double v : eigb.values) totalb += std::max(v, 0.0);
    for (double v : eigb.values)
        out.random_baseline_shares.push_back(totalb > 0.0 ? std::max(v, 0.0) / totalb : 0.0);
    return out;
}

std::vector<WordPair> load_pair_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open pair file: " + path);
    std::vector<WordPair> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected male<TAB>female");
        std::string male = line.substr(0, tab);
        std::string female = line.substr(tab + 1);
        if (male.empty() || female.empty())
            throw DataError(path + ":" + std::to_string(lineno) + ": empty pair member");
        pairs.emplace_back(std::move(male), std::move(female));
    }
    return pairs;
}

std::unordered_set<std::string> load_word_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open word set file: " + path);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        words.insert(line);
    }
    return words;
}

}  // namespace fairembed
