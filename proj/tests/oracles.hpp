#pragma once

// Test-only reference computations, kept independent of the library's own
// solver paths.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "asymlq/types.hpp"

namespace oracles {

using asymlq::Complex;
using asymlq::ComplexVector;
using asymlq::Matrix;

// Truncated series sum_t (A')^t Q A^t, term-by-term accumulation.
inline Matrix dlyap_series(const Matrix& a, const Matrix& q, int terms = 10000) {
    Matrix p = Matrix::Zero(a.rows(), a.cols());
    Matrix power = Matrix::Identity(a.rows(), a.cols());
    for (int t = 0; t < terms; ++t) {
        p += power.transpose() * q * power;
        power = a * power;
        if (power.cwiseAbs().maxCoeff() < 1e-300) break;
    }
    return p;
}

// Scalar control-DARE recursion from p0 = q.
inline double scalar_dare_value_iteration(double a, double b, double q, double r,
                                          int iterations = 100000) {
    double p = q;
    for (int i = 0; i < iterations; ++i) {
        const double next = q + a * a * p - a * a * p * p * b * b / (r + b * b * p);
        if (std::abs(next - p) <= 1e-14) return next;
        p = next;
    }
    return p;
}

// Greedy pivot sequence evaluated directly from the product formula.
inline std::pair<std::vector<Complex>, std::vector<double>> greedy_deltas_product_formula(
    std::vector<Complex> remaining) {
    std::vector<Complex> selected;
    std::vector<double> deltas;
    while (!remaining.empty()) {
        double best_value = -1.0;
        std::size_t best_index = 0;
        for (std::size_t c = 0; c < remaining.size(); ++c) {
            const Complex lam = remaining[c];
            double value = -1.0 / (2.0 * ((lam - 1.0) / (lam + 1.0)).real());
            for (const Complex& prior : selected) {
                const Complex num = (lam - prior) * (std::conj(lam) + 1.0);
                const Complex den = (std::conj(lam) * prior - 1.0) * (lam + 1.0);
                const double f = std::abs(num / den);
                value *= f * f;
            }
            if (value > best_value) {
                best_value = value;
                best_index = c;
            }
        }
        selected.push_back(remaining[best_index]);
        deltas.push_back(best_value);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_index));
    }
    return {selected, deltas};
}

// Dense Cauchy matrix from an ordered spectrum (continuous images).
inline asymlq::ComplexMatrix cauchy_matrix(const ComplexVector& ordered) {
    const auto nn = ordered.size();
    asymlq::ComplexMatrix c(nn, nn);
    for (Eigen::Index h = 0; h < nn; ++h)
        for (Eigen::Index j = 0; j < nn; ++j)
            c(h, j) = -(ordered(h) + 1.0) * (std::conj(ordered(j)) + 1.0) /
                      (2.0 * (ordered(h) * std::conj(ordered(j)) - 1.0));
    return c;
}

// Continuous Lyapunov solve A G + G A' + Q = 0 by Kronecker vectorization.
inline Matrix continuous_lyapunov(const Matrix& a, const Matrix& q) {
    const int n = static_cast<int>(a.rows());
    Matrix big = Matrix::Zero(n * n, n * n);
    Eigen::VectorXd rhs(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int row = i * n + j;  // entry (i, j)
            rhs(row) = -q(i, j);
            for (int k = 0; k < n; ++k) {
                big(row, k * n + j) += a(i, k);  // (A G)_ij
                big(row, i * n + k) += a(j, k);  // (G A')_ij
            }
        }
    Eigen::VectorXd sol = big.partialPivLu().solve(rhs);
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = sol(i * n + j);
    return g;
}

// Random stable matrix with a prescribed spectral radius bound.
template <typename Sampler>
Matrix random_stable(Sampler& draw, int n, double radius) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = draw();
    const double rho = a.eigenvalues().cwiseAbs().maxCoeff();
    if (rho > 0) a *= radius / rho;
    return a;
}

}  // namespace oracles
