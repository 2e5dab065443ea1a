#include "fairembed/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fairembed/core.hpp"

namespace fairembed {

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // Tied values share the mean of their 1-based rank range.
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

namespace {

double log_gamma(double x) { return std::lgamma(x); }

double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-14;
    constexpr double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DataError("spearman: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw DataError("spearman: need at least 3 pairs");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw NumericError("spearman: constant input ranks");

    SpearmanResult result;
    result.r_s = sxy / std::sqrt(sxx * syy);
    result.pairs_evaluated = n;

    // Two-sided p via the t-approximation with n-2 degrees of freedom.
    const double r = std::clamp(result.r_s, -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    if (1.0 - r * r <= 0.0) {
        result.p_two_sided = 0.0;
    } else {
        const double t = r * std::sqrt(df / (1.0 - r * r));
        result.p_two_sided = incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    }
    return result;
}

SpearmanResult similarity_eval(const Embedding& e, const std::string& judgements_path) {
    std::ifstream in(judgements_path);
    if (!in) throw DataError("cannot open judgements file: " + judgements_path);
    std::vector<double> human, machine;
    std::size_t skipped = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        for (auto& c : line)
            if (c == ',' || c == '\t') c = ' ';
        std::istringstream fields(line);
        std::string w1, w2, score_str;
        if (!(fields >> w1 >> w2 >> score_str))
            throw DataError(judgements_path + ":" + std::to_string(lineno) +
                            ": expected word1 word2 score");
        double score = 0.0;
        try {
            score = std::stod(score_str);
        } catch (const std::exception&) {
            throw DataError(judgements_path + ":" + std::to_string(lineno) + ": bad score '" +
                            score_str + "'");
        }
        const auto i1 = e.find(w1), i2 = e.find(w2);
        if (!i1 || !i2) {
            ++skipped;
            continue;
        }
        human.push_back(score);
        machine.push_back(cosine(e.row(*i1), e.row(*i2)));
    }
    if (human.size() < 3)
        throw DataError("similarity_eval: fewer than 3 resolvable pairs in " + judgements_path);
    SpearmanResult result = spearman(human, machine);
    result.pairs_skipped = skipped;
    return result;
}

}  // namespace fairembed
