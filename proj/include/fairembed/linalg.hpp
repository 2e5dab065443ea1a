#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fairembed {

using Vec = std::vector<double>;

double dot(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> v);
// u + v, u - v, scalar multiples; sizes must match (unchecked hot path).
Vec add(std::span<const double> u, std::span<const double> v);
Vec sub(std::span<const double> u, std::span<const double> v);
Vec scale(std::span<const double> v, double a);
void axpy(double a, std::span<const double> x, std::span<double> y);  // y += a*x
// v / ||v||; throws NumericError on zero norm.
Vec normalized(std::span<const double> v);

// Dense symmetric matrix in row-major order, used for covariance work.
struct SymMatrix {
    std::size_t n = 0;
    std::vector<double> a;  // n*n, symmetric

    explicit SymMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

struct EigenResult {
    std::vector<double> values;     // descending
    std::vector<Vec> vectors;       // vectors[i] pairs with values[i], unit norm
};

// Cyclic Jacobi eigendecomposition for symmetric matrices. Deterministic;
// eigenvalues sorted descending; each vector's largest-magnitude component
// is made positive so golden files do not depend on solver sign choices.
EigenResult symmetric_eigen(const SymMatrix& m, double tol = 1e-12, int max_sweeps = 100);

}  // namespace fairembed
