#pragma once

#include <utility>
#include <vector>

#include "asymlq/best_response.hpp"
#include "asymlq/numerics.hpp"

namespace asymlq {

struct GramianPair {
    Matrix Wc, Wo;
    std::vector<double> eigenvalues_c;  // descending
    std::vector<double> eigenvalues_o;  // descending
    std::vector<double> hankel;         // descending, sqrt(eig(Wc Wo))
};

// Wc - A Wc A' = B B'. Requires rho(A) < 1.
Matrix controllability_gramian(const Matrix& a_bar, const Matrix& b_bar,
                               const Tolerances& tol = Tolerances::defaults());

// Wo - A' Wo A = C' C. Requires rho(A) < 1.
Matrix observability_gramian(const Matrix& a_bar, const Matrix& c_bar,
                             const Tolerances& tol = Tolerances::defaults());

// sqrt of eig(Wc Wo), computed through the symmetric form S Wo S with
// S = Wc^(1/2); real and nonnegative despite the non-symmetric product.
std::vector<double> hankel_singular_values(const Matrix& wc, const Matrix& wo,
                                           const Tolerances& tol = Tolerances::defaults());

struct DecayReport {
    ComplexVector ordered_eigenvalues;  // greedy pivot order
    std::vector<double> deltas;         // non-increasing pivot sequence
    std::vector<double> delta_ratios;   // deltas[l] / deltas[0]
    ComplexMatrix cholesky_factor_L;    // unit diagonal, max-abs 1 per column
    std::vector<double> gramian_ratios; // filled by analyze_stage
    std::vector<int> pivot_order;       // position in the input spectrum
    bool flushed = false;               // pivots underflowed and were zeroed
    int flushed_from = -1;              // first zeroed index, -1 if none
};

// Pivot sequence and factor of the Hermitian PD Cauchy matrix built from the
// bilinear images of the plant eigenvalues. Diagonal (complete) pivoting of
// the generator-based factorization realizes the greedy ordering rule; pivots
// below 1e-300 are flushed to zero and flagged.
DecayReport cholesky_decay_estimates(const ComplexVector& eigenvalues,
                                     const Tolerances& tol = Tolerances::defaults());

struct ApproximationBound {
    int l = 0;                // pivots used
    int rank_limit = 0;       // l * m
    double epsilon = 0.0;     // delta_l / delta_1
    Matrix W_hat;             // real part of the rank-limited reconstruction
    double actual_error = 0.0;  // ||Wc - Re(W_hat)||_inf
    double bound = 0.0;
    bool satisfied = false;
    int numerical_rank = 0;   // of the complex reconstruction, 1e-10 relative
    double imag_rel = 0.0;    // ||Im(W_hat)|| / ||Re(W_hat)||, max-abs
    bool prefix_conjugate_closed = true;
};

// Low-rank Gramian reconstruction from the first l pivots and the
// eigenvector-weighted columns of the bilinear-transformed input matrix,
// together with the eigenvalue-decay error bound. Requires rho(A) < 1 and A
// diagonalizable.
ApproximationBound lowrank_gramian_approx(const Matrix& a_bar, const Matrix& b_bar, int l,
                                          const Tolerances& tol = Tolerances::defaults());

// Continuous-time pair (Ac, Bc) with Ac = (A+I)^-1 (A-I), Bc = sqrt(2)
// (A+I)^-1 B, whose continuous Gramian equals the discrete Gramian of (A, B).
// Eigenvalues map as lambda_c = (lambda-1)/(lambda+1).
std::pair<Matrix, Matrix> bilinear_transform(const Matrix& a_bar, const Matrix& b_bar);

struct StageAnalysis {
    GramianPair gramians;
    DecayReport decay;
    std::vector<ApproximationBound> bounds;  // one per grid entry, possibly empty
    std::string bounds_skipped_reason;       // non-empty when bounds were skipped
};

// Full analysis of one stage's augmented plant: Gramians, Hankel values,
// decay estimates, and bounds at each l in the grid (all l when empty).
// Bounds are skipped with a reason when the plant fails the
// diagonalizability gate.
StageAnalysis analyze_stage(const StageSolution& stage, std::vector<int> l_grid = {},
                            const Tolerances& tol = Tolerances::defaults());

}  // namespace asymlq
