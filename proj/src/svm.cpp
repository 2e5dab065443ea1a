#include "fairembed/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairembed/core.hpp"

namespace fairembed {

namespace {

double rbf(const double* a, const double* b, std::size_t dim, double gamma) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return std::exp(-gamma * s);
}

}  // namespace

void RbfSvm::fit(const std::vector<double>& rows, std::size_t n, std::size_t dim,
                 const std::vector<int>& labels, const SvmConfig& cfg) {
    if (rows.size() != n * dim) throw DataError("svm: feature matrix size mismatch");
    if (labels.size() != n) throw DataError("svm: label count mismatch");
    if (n < 2) throw DataError("svm: need at least two examples");
    for (int y : labels)
        if (y != 1 && y != -1) throw DataError("svm: labels must be +1/-1");

    dim_ = dim;
    gamma_ = cfg.gamma;
    if (gamma_ <= 0.0) {
        // 1 / (dim * mean component variance), sklearn-style "scale".
        double mean_var = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += rows[i * dim + j];
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double diff = rows[i * dim + j] - mean;
                var += diff * diff;
            }
            mean_var += var / static_cast<double>(n);
        }
        mean_var /= static_cast<double>(dim);
        if (mean_var <= 0.0) throw NumericError("svm: zero feature variance");
        gamma_ = 1.0 / (static_cast<double>(dim) * mean_var);
    }

    // Full kernel matrix; training sets here are ~1000 points.
    std::vector<double> kernel(n * n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double k = rbf(rows.data() + i * dim, rows.data() + j * dim, dim, gamma_);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    });

    // Simplified SMO with randomized second index.
    std::vector<double> alpha(n, 0.0);
    double b = 0.0;
    Rng rng(cfg.seed);
    auto decision_i = [&](std::size_t i) {
        double f = b;
        for (std::size_t j = 0; j < n; ++j)
            if (alpha[j] > 0.0) f += alpha[j] * labels[j] * kernel[j * n + i];
        return f;
    };

    std::size_t quiet_passes = 0;
    for (std::size_t pass = 0; pass < cfg.max_passes && quiet_passes < 3; ++pass) {
        std::size_t changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = decision_i(i) - labels[i];
            const bool violates = (labels[i] * ei < -cfg.tolerance && alpha[i] < cfg.c) ||
                                  (labels[i] * ei > cfg.tolerance && alpha[i] > 0.0);
            if (!violates) continue;
            std::size_t j = static_cast<std::size_t>(rng.uniform_int(n - 1));
            if (j >= i) ++j;
            const double ej = decision_i(j) - labels[j];

            const double ai_old = alpha[i], aj_old = alpha[j];
            double lo, hi;
            if (labels[i] != labels[j]) {
                lo = std::max(0.0, aj_old - ai_old);
                hi = std::min(cfg.c, cfg.c + aj_old - ai_old);
            } else {
                lo = std::max(0.0, ai_old + aj_old - cfg.c);
                hi = std::min(cfg.c, ai_old + aj_old);
            }
            if (lo >= hi) continue;
            const double eta = 2.0 * kernel[i * n + j] - kernel[i * n + i] - kernel[j * n + j];
            if (eta >= 0.0) continue;
            double aj = aj_old - labels[j] * (ei - ej) / eta;
            aj = std::clamp(aj, lo, hi);
            if (std::abs(aj - aj_old) < 1e-5) continue;
            const double ai = ai_old + labels[i] * labels[j] * (aj_old - aj);
            alpha[i] = ai;
            alpha[j] = aj;

            const double b1 = b - ei - labels[i] * (ai - ai_old) * kernel[i * n + i] -
                              labels[j] * (aj - aj_old) * kernel[i * n + j];
            const double b2 = b - ej - labels[i] * (ai - ai_old) * kernel[i * n + j] -
                              labels[j] * (aj - aj_old) * kernel[j * n + j];
            if (ai > 0.0 && ai < cfg.c)
                b = b1;
            else if (aj > 0.0 && aj < cfg.c)
                b = b2;
            else
                b = (b1 + b2) / 2.0;
            ++changed;
        }
        quiet_passes = changed == 0 ? quiet_passes + 1 : 0;
    }

    support_.clear();
    alpha_y_.clear();
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] <= 0.0) continue;
        support_.insert(support_.end(), rows.begin() + static_cast<std::ptrdiff_t>(i * dim),
                        rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
        alpha_y_.push_back(alpha[i] * labels[i]);
    }
    bias_ = b;
}

double RbfSvm::decision(const double* x) const {
    double f = bias_;
    for (std::size_t s = 0; s < alpha_y_.size(); ++s)
        f += alpha_y_[s] * rbf(support_.data() + s * dim_, x, dim_, gamma_);
    return f;
}

ReclassifyResult svm_reclassify(const Embedding& e, const std::vector<BiasedWord>& biased,
                                std::size_t train_n, std::uint64_t seed, const SvmConfig& cfg) {
    if (train_n % 2 != 0) throw ConfigError("svm_reclassify: train_n must be even");
    std::vector<std::pair<std::size_t, int>> pos, neg;  // (row, label)
    ReclassifyResult result;
    for (const auto& bw : biased) {
        if (auto i = e.find(bw.word)) {
            if (bw.side == BiasSide::Positive)
                pos.emplace_back(*i, 1);
            else
                neg.emplace_back(*i, -1);
        } else {
            ++result.skipped_words;
        }
    }
    const std::size_t per_side = train_n / 2;
    if (pos.size() < per_side || neg.size() < per_side)
        throw DataError("svm_reclassify: cannot draw a balanced training sample");

    // Balanced random training sample; the remainder is the test set.
    Rng rng(seed);
    auto shuffle = [&](std::vector<std::pair<std::size_t, int>>& v) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(v.size() - i));
            std::swap(v[i], v[j]);
        }
    };
    shuffle(pos);
    shuffle(neg);

    const std::size_t dim = e.dim();
    std::vector<double> train_rows(train_n * dim);
    std::vector<int> train_labels(train_n);
    for (std::size_t i = 0; i < per_side; ++i) {
        const auto vp = e.row(pos[i].first);
        const auto vn = e.row(neg[i].first);
        std::copy(vp.begin(), vp.end(), train_rows.begin() + static_cast<std::ptrdiff_t>(i * dim));
        std::copy(vn.begin(), vn.end(),
                  train_rows.begin() + static_cast<std::ptrdiff_t>((per_side + i) * dim));
        train_labels[i] = 1;
        train_labels[per_side + i] = -1;
    }

    RbfSvm svm;
    svm.fit(train_rows, train_n, dim, train_labels, cfg);

    std::size_t correct = 0, total = 0;
    auto eval = [&](const std::vector<std::pair<std::size_t, int>>& v, std::size_t from) {
        for (std::size_t i = from; i < v.size(); ++i) {
            const auto row = e.row(v[i].first);
            std::vector<double> x(row.begin(), row.end());
            if (svm.predict(x.data()) == v[i].second) ++correct;
            ++total;
        }
    };
    eval(pos, per_side);
    eval(neg, per_side);
    if (total == 0) throw DataError("svm_reclassify: no test words left");

    result.accuracy = static_cast<double>(correct) / static_cast<double>(total);
    result.train_words = train_n;
    result.test_words = total;
    return result;
}

}  // namespace fairembed
