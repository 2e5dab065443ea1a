#include "fairembed/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairembed/core.hpp"

namespace fairembed {

BiasDirection bias_direction(const Embedding& e, const std::vector<WordPair>& pairs) {
    DefinitionalPairs dp{pairs};
    const GenderSubspace sub = compute_bias_subspace(e, dp, FixedK{1});
    return BiasDirection{sub.basis.front()};
}

std::vector<BiasedWord> select_biased_words(const Embedding& e, const BiasDirection& b,
                                            std::size_t n_per_side) {
    if (e.size() < 2 * n_per_side)
        throw DataError("select_biased_words: vocabulary smaller than 2n");
    const auto& unit = e.unit_rows();
    const Vec dir = normalized(b.direction);
    std::vector<std::pair<double, std::size_t>> scored(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < e.dim(); ++j) s += unit[i * e.dim() + j] * dir[j];
        scored[i] = {s, i};
    }
    // Descending cosine; ties toward smaller vocabulary index from either end.
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b2) {
        if (a.first != b2.first) return a.first > b2.first;
        return a.second < b2.second;
    });
    std::vector<BiasedWord> out;
    out.reserve(2 * n_per_side);
    for (std::size_t r = 0; r < n_per_side; ++r)
        out.push_back({e.vocab().word(scored[r].second), BiasSide::Positive});
    for (std::size_t r = 0; r < n_per_side; ++r)
        out.push_back(
            {e.vocab().word(scored[scored.size() - 1 - r].second), BiasSide::Negative});
    return out;
}

namespace {

// Gaussian affinities with per-point precision matched to the target
// perplexity by binary search (entropy in nats against log(perplexity)).
std::vector<double> input_affinities(const std::vector<double>& data, std::size_t m,
                                     std::size_t d, double perplexity) {
    std::vector<double> dist2(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = data[i * d + k] - data[j * d + k];
                s += diff * diff;
            }
            dist2[i * m + j] = dist2[j * m + i] = s;
        }

    const double target_entropy = std::log(perplexity);
    std::vector<double> p(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double beta = 1.0, beta_min = -std::numeric_limits<double>::infinity(),
               beta_max = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 200; ++iter) {
            double sum = 0.0, weighted = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i) continue;
                const double w = std::exp(-beta * dist2[i * m + j]);
                p[i * m + j] = w;
                sum += w;
                weighted += w * dist2[i * m + j];
            }
            if (sum <= 0.0) {
                // All neighbours collapsed numerically; soften and retry.
                beta /= 2.0;
                continue;
            }
            const double entropy = std::log(sum) + beta * weighted / sum;
            const double diff = entropy - target_entropy;
            if (std::abs(diff) < 1e-5) break;
            if (diff > 0.0) {
                beta_min = beta;
                beta = std::isinf(beta_max) ? beta * 2.0 : (beta + beta_max) / 2.0;
            } else {
                beta_max = beta;
                beta = std::isinf(beta_min) ? beta / 2.0 : (beta + beta_min) / 2.0;
            }
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) sum += p[i * m + j];
        if (sum <= 0.0) throw NumericError("tSNE: degenerate affinity row");
        for (std::size_t j = 0; j < m; ++j) p[i * m + j] /= sum;
    }

    // Symmetrize: p_ij = (p_j|i + p_i|j) / (2m), floored away from zero.
    std::vector<double> sym(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            sym[i * m + j] = std::max((p[i * m + j] + p[j * m + i]) / (2.0 * m), 1e-12);
        }
    return sym;
}

}  // namespace

TsneResult tsne_2d(const std::vector<double>& data, std::size_t m, std::size_t d,
                   double perplexity, std::size_t iterations, std::uint64_t seed) {
    if (m * d != data.size()) throw DataError("tSNE: data size does not match m x d");
    if (perplexity <= 1.0) throw ConfigError("tSNE: perplexity must exceed 1");
    if (static_cast<double>(m) < 3.0 * perplexity)
        throw DataError("tSNE: perplexity infeasible for " + std::to_string(m) + " points");

    const auto p = input_affinities(data, m, d, perplexity);

    Rng rng(seed);
    std::vector<double> y(m * 2);
    for (auto& v : y) v = rng.gaussian() * 1e-4;

    // One O(m^2) pass yields the KL divergence plus both gradient
    // components, so the gradient under any exaggeration factor is a
    // linear combination: grad = 4 * (scale * attract - repel).
    struct EvalState {
        double kl = 0.0;
        std::vector<double> attract, repel;
    };
    auto evaluate = [&](const std::vector<double>& pos) {
        EvalState s;
        s.attract.assign(m * 2, 0.0);
        s.repel.assign(m * 2, 0.0);
        std::vector<double> w(m * m, 0.0);
        double q_sum = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                const double dx = pos[i * 2] - pos[j * 2];
                const double dy = pos[i * 2 + 1] - pos[j * 2 + 1];
                const double wij = 1.0 / (1.0 + dx * dx + dy * dy);
                w[i * m + j] = w[j * m + i] = wij;
                q_sum += 2.0 * wij;
            }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                const double pij = p[i * m + j];
                const double wij = w[i * m + j];
                const double qij = std::max(wij / q_sum, 1e-12);
                const double dx = pos[i * 2] - pos[j * 2];
                const double dy = pos[i * 2 + 1] - pos[j * 2 + 1];
                s.attract[i * 2] += pij * wij * dx;
                s.attract[i * 2 + 1] += pij * wij * dy;
                s.repel[i * 2] += qij * wij * dx;
                s.repel[i * 2 + 1] += qij * wij * dy;
                s.kl += pij * std::log(pij / qij);
            }
        return s;
    };

    auto recenter = [&](std::vector<double>& pos) {
        double cx = 0.0, cy = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            cx += pos[i * 2];
            cy += pos[i * 2 + 1];
        }
        cx /= static_cast<double>(m);
        cy /= static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            pos[i * 2] -= cx;
            pos[i * 2 + 1] -= cy;
        }
    };

    const std::size_t exaggeration_end = std::min<std::size_t>(250, iterations);
    const double exaggeration = 12.0;
    const double eta = 200.0;

    TsneResult result;
    result.exaggeration_end = exaggeration_end;
    result.kl_history.reserve(iterations);

    std::vector<double> velocity(m * 2, 0.0), gains(m * 2, 1.0), grad(m * 2, 0.0);
    EvalState state = evaluate(y);
    double eta_scale = 1.0;

    for (std::size_t iter = 0; iter < iterations; ++iter) {
        result.kl_history.push_back(state.kl);
        const double p_scale = iter < exaggeration_end ? exaggeration : 1.0;
        const double momentum = iter < exaggeration_end ? 0.5 : 0.8;
        for (std::size_t k = 0; k < m * 2; ++k)
            grad[k] = 4.0 * (p_scale * state.attract[k] - state.repel[k]);

        std::vector<double> candidate = y;
        for (std::size_t k = 0; k < m * 2; ++k) {
            const bool same_sign = (grad[k] > 0.0) == (velocity[k] > 0.0);
            gains[k] = same_sign ? std::max(gains[k] * 0.8, 0.01) : gains[k] + 0.2;
            velocity[k] = momentum * velocity[k] - eta * eta_scale * gains[k] * grad[k];
            candidate[k] += velocity[k];
        }
        recenter(candidate);
        EvalState cand = evaluate(candidate);

        // After exaggeration the trajectory must descend: a step that
        // raises the KL is rolled back with the momentum cleared and the
        // step size tightened.
        if (iter >= exaggeration_end && cand.kl > state.kl) {
            std::fill(velocity.begin(), velocity.end(), 0.0);
            eta_scale = std::max(eta_scale * 0.5, 1e-4);
        } else {
            y = std::move(candidate);
            state = std::move(cand);
            eta_scale = std::min(eta_scale * 1.05, 1.0);
        }
    }

    result.points = std::move(y);
    return result;
}

KmeansResult kmeans(const std::vector<double>& points, std::size_t m, std::size_t dim,
                    std::size_t k, std::uint64_t seed, std::size_t restarts) {
    if (m * dim != points.size()) throw DataError("kmeans: data size does not match m x dim");
    if (k == 0 || m < k) throw DataError("kmeans: need at least k points");
    if (restarts == 0) throw ConfigError("kmeans: restarts must be positive");

    auto dist2 = [&](const double* a, const double* b) {
        double s = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double diff = a[j] - b[j];
            s += diff * diff;
        }
        return s;
    };

    KmeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();

    for (std::size_t restart = 0; restart < restarts; ++restart) {
        Rng rng(derive_seed(seed, "kmeans-restart-" + std::to_string(restart)));

        // k-means++ seeding.
        std::vector<double> centers(k * dim, 0.0);
        std::vector<char> chosen(m, 0);
        {
            const std::size_t first = static_cast<std::size_t>(rng.uniform_int(m));
            std::copy_n(points.data() + first * dim, dim, centers.data());
            chosen[first] = 1;
            std::vector<double> min_d2(m, 0.0);
            for (std::size_t i = 0; i < m; ++i)
                min_d2[i] = dist2(points.data() + i * dim, centers.data());
            for (std::size_t c = 1; c < k; ++c) {
                double total = std::accumulate(min_d2.begin(), min_d2.end(), 0.0);
                std::size_t pick = 0;
                if (total > 0.0) {
                    double target = rng.uniform() * total;
                    for (std::size_t i = 0; i < m; ++i) {
                        target -= min_d2[i];
                        if (target <= 0.0) {
                            pick = i;
                            break;
                        }
                    }
                } else {
                    // All remaining distances zero (duplicate points): take
                    // the first unchosen index.
                    while (pick < m && chosen[pick]) ++pick;
                    if (pick == m) pick = 0;
                }
                chosen[pick] = 1;
                std::copy_n(points.data() + pick * dim, dim, centers.data() + c * dim);
                for (std::size_t i = 0; i < m; ++i)
                    min_d2[i] = std::min(min_d2[i], dist2(points.data() + i * dim,
                                                          centers.data() + c * dim));
            }
        }

        std::vector<std::size_t> labels(m, 0);
        std::vector<double> history;
        double inertia = 0.0;
        for (std::size_t iter = 0; iter < 1000; ++iter) {
            inertia = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double bd = std::numeric_limits<double>::infinity();
                std::size_t bc = 0;
                for (std::size_t c = 0; c < k; ++c) {
                    const double d2v = dist2(points.data() + i * dim, centers.data() + c * dim);
                    if (d2v < bd) {
                        bd = d2v;
                        bc = c;
                    }
                }
                labels[i] = bc;
                inertia += bd;
            }
            history.push_back(inertia);

            std::vector<double> sums(k * dim, 0.0);
            std::vector<std::size_t> counts(k, 0);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < dim; ++j) sums[labels[i] * dim + j] += points[i * dim + j];
                ++counts[labels[i]];
            }
            double shift = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                if (counts[c] == 0) {
                    // Re-seed an empty cluster on the farthest point.
                    std::size_t far = 0;
                    double fd = -1.0;
                    for (std::size_t i = 0; i < m; ++i) {
                        const double d2v =
                            dist2(points.data() + i * dim, centers.data() + labels[i] * dim);
                        if (d2v > fd) {
                            fd = d2v;
                            far = i;
                        }
                    }
                    for (std::size_t j = 0; j < dim; ++j) {
                        const double nc = points[far * dim + j];
                        shift += (nc - centers[c * dim + j]) * (nc - centers[c * dim + j]);
                        centers[c * dim + j] = nc;
                    }
                    continue;
                }
                for (std::size_t j = 0; j < dim; ++j) {
                    const double nc = sums[c * dim + j] / static_cast<double>(counts[c]);
                    shift += (nc - centers[c * dim + j]) * (nc - centers[c * dim + j]);
                    centers[c * dim + j] = nc;
                }
            }
            if (shift < 1e-8 * 1e-8) break;
        }

        if (inertia < best.inertia) {
            best.inertia = inertia;
            best.labels = std::move(labels);
            best.inertia_history = std::move(history);
        }
    }
    return best;
}

ClusterReport v_measure(const std::vector<std::size_t>& predicted,
                        const std::vector<std::size_t>& gold) {
    if (predicted.size() != gold.size()) throw DataError("v_measure: length mismatch");
    if (predicted.empty()) throw DataError("v_measure: empty labelings");
    const double n = static_cast<double>(predicted.size());

    auto counts_of = [](const std::vector<std::size_t>& labels) {
        std::vector<std::size_t> ids = labels;
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return ids;
    };
    const auto gold_ids = counts_of(gold);
    const auto pred_ids = counts_of(predicted);

    auto index_of = [](const std::vector<std::size_t>& ids, std::size_t v) {
        return static_cast<std::size_t>(
            std::lower_bound(ids.begin(), ids.end(), v) - ids.begin());
    };

    std::vector<double> joint(gold_ids.size() * pred_ids.size(), 0.0);
    std::vector<double> gold_marginal(gold_ids.size(), 0.0), pred_marginal(pred_ids.size(), 0.0);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const std::size_t g = index_of(gold_ids, gold[i]);
        const std::size_t p = index_of(pred_ids, predicted[i]);
        joint[g * pred_ids.size() + p] += 1.0;
        gold_marginal[g] += 1.0;
        pred_marginal[p] += 1.0;
    }

    auto entropy = [&](const std::vector<double>& marginal) {
        double h = 0.0;
        for (double c : marginal)
            if (c > 0.0) h -= (c / n) * std::log(c / n);
        return h;
    };
    const double h_gold = entropy(gold_marginal);
    const double h_pred = entropy(pred_marginal);

    double h_gold_given_pred = 0.0, h_pred_given_gold = 0.0;
    for (std::size_t g = 0; g < gold_ids.size(); ++g)
        for (std::size_t p = 0; p < pred_ids.size(); ++p) {
            const double c = joint[g * pred_ids.size() + p];
            if (c <= 0.0) continue;
            h_gold_given_pred -= (c / n) * std::log(c / pred_marginal[p]);
            h_pred_given_gold -= (c / n) * std::log(c / gold_marginal[g]);
        }

    ClusterReport report;
    report.sample_size = predicted.size();
    // 0/0 convention: a zero-entropy reference counts as perfect.
    report.homogeneity = h_gold == 0.0 ? 1.0 : 1.0 - h_gold_given_pred / h_gold;
    report.completeness = h_pred == 0.0 ? 1.0 : 1.0 - h_pred_given_gold / h_pred;
    const double hc = report.homogeneity + report.completeness;
    report.v_measure = hc == 0.0 ? 0.0 : 2.0 * report.homogeneity * report.completeness / hc;
    return report;
}

ClusterEvalResult cluster_purity_eval(const Embedding& e, const std::vector<BiasedWord>& biased,
                                      const ClusterEvalConfig& cfg) {
    std::vector<std::pair<std::size_t, std::size_t>> resolvable;  // (row, gold label)
    std::size_t skipped = 0;
    for (const auto& bw : biased) {
        if (auto i = e.find(bw.word))
            resolvable.emplace_back(*i, bw.side == BiasSide::Positive ? 0 : 1);
        else
            ++skipped;
    }
    if (resolvable.size() < cfg.sample_size)
        throw DataError("cluster_purity_eval: fewer resolvable words than sample_size");

    ClusterEvalResult result;
    result.skipped_words = skipped;
    result.samples = cfg.samples;
    result.sample_v.assign(cfg.samples, 0.0);
    std::vector<double> hs(cfg.samples, 0.0), cs(cfg.samples, 0.0);

    parallel_for(cfg.samples, [&](std::size_t s) {
        Rng rng(derive_seed(cfg.seed, "cluster-sample-" + std::to_string(s)));
        // Partial Fisher-Yates over index positions.
        std::vector<std::size_t> order(resolvable.size());
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = 0; i < cfg.sample_size; ++i) {
            const std::size_t j =
                i + static_cast<std::size_t>(rng.uniform_int(order.size() - i));
            std::swap(order[i], order[j]);
        }
        // Unit rows: the clustering protocol is about angular structure,
        // and raw CBOW norms track word frequency, not gender.
        const auto& unit = e.unit_rows();
        std::vector<double> data(cfg.sample_size * e.dim());
        std::vector<std::size_t> gold(cfg.sample_size);
        for (std::size_t i = 0; i < cfg.sample_size; ++i) {
            const auto [row, label] = resolvable[order[i]];
            std::copy(unit.begin() + static_cast<std::ptrdiff_t>(row * e.dim()),
                      unit.begin() + static_cast<std::ptrdiff_t>((row + 1) * e.dim()),
                      data.begin() + static_cast<std::ptrdiff_t>(i * e.dim()));
            gold[i] = label;
        }
        const auto projected =
            tsne_2d(data, cfg.sample_size, e.dim(), cfg.perplexity, cfg.tsne_iterations,
                    derive_seed(cfg.seed, "tsne-" + std::to_string(s)));
        const auto clusters =
            kmeans(projected.points, cfg.sample_size, 2, 2,
                   derive_seed(cfg.seed, "kmeans-" + std::to_string(s)), cfg.kmeans_restarts);
        const auto report = v_measure(clusters.labels, gold);
        result.sample_v[s] = report.v_measure;
        hs[s] = report.homogeneity;
        cs[s] = report.completeness;
    });

    double sum = 0.0;
    for (double v : result.sample_v) sum += v;
    result.mean_v = sum / static_cast<double>(cfg.samples);
    double var = 0.0;
    for (double v : result.sample_v) var += (v - result.mean_v) * (v - result.mean_v);
    result.std_v = cfg.samples > 1 ? std::sqrt(var / static_cast<double>(cfg.samples - 1)) : 0.0;
    result.mean_homogeneity =
        std::accumulate(hs.begin(), hs.end(), 0.0) / static_cast<double>(cfg.samples);
    result.mean_completeness =
        std::accumulate(cs.begin(), cs.end(), 0.0) / static_cast<double>(cfg.samples);
    return result;
}

}  // namespace fairembed
