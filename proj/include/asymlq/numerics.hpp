#pragma once

#include "asymlq/types.hpp"

namespace asymlq {

// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Matrix& a);

// Solves P - A'PA = Q for stable A and symmetric Q.
// Throws NotStable if rho(A) >= 1, NoConvergence if the residual target is missed.
Matrix solve_dlyap(const Matrix& a, const Matrix& q,
                   const Tolerances& tol = Tolerances::defaults());

struct EigenDecomposition {
    ComplexVector eigenvalues;
    ComplexMatrix right_eigenvectors;    // unit-norm columns
    ComplexMatrix inverse_eigenvectors;
    double condition_number_inf = 0.0;   // ||X||_inf * ||X^-1||_inf
};

// Throws Defective when the eigenvector matrix fails the condition gate.
EigenDecomposition eig_decomposition(const Matrix& a,
                                     const Tolerances& tol = Tolerances::defaults());

enum class RiccatiRole { Minimizer, Maximizer };

struct RiccatiSolution {
    Matrix P;           // fixed point (P for control, Sigma for filtering)
    Matrix gain;        // K (control) or L (filter)
    double closed_loop_spectral_radius = 0.0;
    int iterations_used = 0;
    double residual = 0.0;  // relative fixed-point residual
};

// Stabilizing solution of P = Q + A'PA - A'PB (R + B'PB)^-1 B'PA with
// K = -(R + B'PB)^-1 B'PA, via fixed-point iteration from P0 = Q.
// Minimizer role requires R + B'PB > 0 along the way; maximizer role requires
// R + B'PB < 0 (the boundedness condition) and reports its loss, or iterate
// blow-up, as ValueUnbounded.
RiccatiSolution solve_dare_control(const Matrix& a, const Matrix& b, const Matrix& q,
                                   const Matrix& r, RiccatiRole role,
                                   const Tolerances& tol = Tolerances::defaults());

// Stabilizing solution of S = W + ASA' - ASC' (V + CSC')^-1 CSA' with
// L = ASC' (V + CSC')^-1, via fixed-point iteration from S0 = W.
RiccatiSolution solve_dare_filter(const Matrix& a, const Matrix& c, const Matrix& w_eff,
                                  const Matrix& v,
                                  const Tolerances& tol = Tolerances::defaults());

namespace detail {
// Solves M X = B with partial pivoting; throws NoConvergence when the
// condition estimate exceeds tol.condition_limit.
Matrix solve_linear(const Matrix& m, const Matrix& b, const Tolerances& tol);
}  // namespace detail

}  // namespace asymlq
