#include "fairembed/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairembed/core.hpp"

namespace fairembed {

double dot(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Vec add(std::span<const double> u, std::span<const double> v) {
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + v[i];
    return out;
}

Vec sub(std::span<const double> u, std::span<const double> v) {
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - v[i];
    return out;
}

Vec scale(std::span<const double> v, double a) {
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * a;
    return out;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vec normalized(std::span<const double> v) {
    const double n = norm(v);
    if (n == 0.0) throw NumericError("cannot normalize zero vector");
    return scale(v, 1.0 / n);
}

EigenResult symmetric_eigen(const SymMatrix& m, double tol, int max_sweeps) {
    const std::size_t n = m.n;
    std::vector<double> a = m.a;
    // V starts as identity and accumulates rotations columnwise.
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    auto off_diagonal = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
        return s;
    };

    double scale_ref = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) scale_ref = std::max(scale_ref, std::abs(a[i]));
    const double threshold = tol * tol * std::max(scale_ref * scale_ref, 1e-300);

    for (int sweep = 0; sweep < max_sweeps && off_diagonal() > threshold; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                // Stable tangent of the rotation angle.
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a[i * n + i] > a[j * n + j];
    });

    EigenResult out;
    out.values.resize(n);
    out.vectors.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t col = order[r];
        out.values[r] = a[col * n + col];
        Vec vec(n);
        for (std::size_t k = 0; k < n; ++k) vec[k] = v[k * n + col];
        // Sign convention: largest-magnitude component positive.
        std::size_t imax = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (std::abs(vec[k]) > std::abs(vec[imax])) imax = k;
        if (vec[imax] < 0.0)
            for (auto& x : vec) x = -x;
        out.vectors[r] = std::move(vec);
    }
    return out;
}

}  // namespace fairembed
