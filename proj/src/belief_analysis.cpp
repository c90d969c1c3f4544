#include "asymlq/belief_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace asymlq {

Matrix controllability_gramian(const Matrix& a_bar, const Matrix& b_bar, const Tolerances& tol) {
    if (b_bar.rows() != a_bar.rows())
        throw std::invalid_argument("controllability_gramian: dimension mismatch");
    return solve_dlyap(a_bar.transpose(), Matrix(b_bar * b_bar.transpose()), tol);
}

Matrix observability_gramian(const Matrix& a_bar, const Matrix& c_bar, const Tolerances& tol) {
    if (c_bar.cols() != a_bar.rows())
        throw std::invalid_argument("observability_gramian: dimension mismatch");
    return solve_dlyap(a_bar, Matrix(c_bar.transpose() * c_bar), tol);
}

namespace {

std::vector<double> descending_sym_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
    std::sort(out.rbegin(), out.rend());
    return out;
}

// Symmetric PSD square root with tiny negative eigenvalues clamped to zero.
Matrix psd_sqrt(const Matrix& m, const char* name, const Tolerances& tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -tol.sign_check * scale)
        throw SolverError(SolverErrorKind::NotPsd,
                          std::string(name) + " has eigenvalue " +
                              brief(es.eigenvalues().minCoeff()));
    Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

std::vector<double> hankel_singular_values(const Matrix& wc, const Matrix& wo,
                                           const Tolerances& tol) {
    if (wc.rows() != wc.cols() || wo.rows() != wo.cols() || wc.rows() != wo.rows())
        throw std::invalid_argument("hankel_singular_values: dimension mismatch");
    const Matrix s = psd_sqrt(wc, "Wc", tol);
    // eig(Wc Wo) = eig(S Wo S), symmetric PSD
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s * wo * s), Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -tol.sign_check * scale)
        throw SolverError(SolverErrorKind::NotPsd, "Wo fails the PSD check");
    std::vector<double> out;
    out.reserve(wc.rows());
    for (Eigen::Index i = 0; i < wc.rows(); ++i)
        out.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
    std::sort(out.rbegin(), out.rend());
    return out;
}

namespace {

// Replaces near-conjugate eigenvalue pairs with exact conjugates so that all
// later complex arithmetic is conjugation-symmetric to machine precision.
ComplexVector pair_conjugates(const ComplexVector& eigenvalues) {
    ComplexVector out = eigenvalues;
    const auto nn = out.size();
    std::vector<bool> used(nn, false);
    for (Eigen::Index i = 0; i < nn; ++i) {
        if (used[i] || out(i).imag() <= 0.0) continue;
        Eigen::Index best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < nn; ++j) {
            if (used[j] || j == i || out(j).imag() >= 0.0) continue;
            const double d = std::abs(std::conj(out(i)) - out(j));
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best >= 0 && best_dist <= 1e-8 * std::max(1.0, std::abs(out(i)))) {
            out(best) = std::conj(out(i));
            used[i] = used[best] = true;
        }
    }
    return out;
}

constexpr double kPivotFloor = 1e-300;

}  // namespace

DecayReport cholesky_decay_estimates(const ComplexVector& eigenvalues, const Tolerances& tol) {
    const int nn = static_cast<int>(eigenvalues.size());
    if (nn == 0) throw std::invalid_argument("cholesky_decay_estimates: empty spectrum");
    for (int i = 0; i < nn; ++i) {
        if (std::abs(eigenvalues(i)) >= 1.0)
            throw SolverError(SolverErrorKind::NotStable,
                              "eigenvalue modulus >= 1, decay estimate undefined");
        if (std::abs(eigenvalues(i) + 1.0) <= 1e-14)
            throw SolverError(SolverErrorKind::SingularShift,
                              "eigenvalue at -1, bilinear map singular");
    }

    const ComplexVector lam = pair_conjugates(eigenvalues);
    // Generators of the self-adjoint Cauchy matrix C_hj = 1/(x_h + conj(x_j))
    // with x = -(lambda-1)/(lambda+1); Re(x) > 0 for a stable spectrum.
    std::vector<Complex> x(nn);
    for (int i = 0; i < nn; ++i) x[i] = -(lam(i) - 1.0) / (lam(i) + 1.0);

    std::vector<int> order(nn);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> g(nn);
    for (int i = 0; i < nn; ++i) g[i] = 1.0 / (2.0 * x[i].real());

    DecayReport report;
    report.deltas.assign(nn, 0.0);

    // GECP on the generators: each step pivots the largest remaining diagonal
    // of the Schur complement and rescales the rest by |s|^2 < 1.
    std::vector<Complex> xs = x;
    int rank = nn;
    for (int m = 0; m < nn; ++m) {
        int l = m;
        for (int k = m + 1; k < nn; ++k)
            if (g[k] > g[l]) l = k;
        if (!(g[l] > kPivotFloor)) {
            rank = m;
            report.flushed = true;
            report.flushed_from = m;
            break;
        }
        std::swap(order[m], order[l]);
        std::swap(g[m], g[l]);
        std::swap(xs[m], xs[l]);
        report.deltas[m] = g[m];
        for (int k = m + 1; k < nn; ++k) {
            const Complex s = (xs[k] - xs[m]) / (xs[k] + std::conj(xs[m]));
            g[k] *= std::norm(s);
        }
    }
    // Zeroed tail keeps the report lists at full length.
    if (rank < nn)
        for (int m = rank; m < nn; ++m) report.deltas[m] = 0.0;

    report.ordered_eigenvalues.resize(nn);
    report.pivot_order.assign(order.begin(), order.end());
    for (int i = 0; i < nn; ++i) report.ordered_eigenvalues(i) = lam(order[i]);

    report.delta_ratios.resize(nn);
    for (int i = 0; i < nn; ++i) report.delta_ratios[i] = report.deltas[i] / report.deltas[0];

    // Unit-lower-triangular factor in pivot order, via the same generator
    // recursion; columns beyond the numerical rank stay identity columns.
    std::vector<Complex> xo(nn), a(nn, Complex(1.0, 0.0));
    for (int i = 0; i < nn; ++i) xo[i] = x[order[i]];
    ComplexMatrix lmat = ComplexMatrix::Identity(nn, nn);
    for (int k = 0; k < rank; ++k) {
        if (k > 0) {
            for (int i = k; i < nn; ++i)
                a[i] *= (xo[i] - xo[k - 1]) / (xo[i] + std::conj(xo[k - 1]));
        }
        const double dkk = (a[k] * std::conj(a[k]) / (xo[k] + std::conj(xo[k]))).real();
        for (int i = k + 1; i < nn; ++i)
            lmat(i, k) = a[i] * std::conj(a[k]) / (xo[i] + std::conj(xo[k])) / dkk;
    }
    report.cholesky_factor_L = std::move(lmat);
    (void)tol;
    return report;
}

std::pair<Matrix, Matrix> bilinear_transform(const Matrix& a_bar, const Matrix& b_bar) {
    const auto n = a_bar.rows();
    if (a_bar.cols() != n || b_bar.rows() != n)
        throw std::invalid_argument("bilinear_transform: dimension mismatch");
    const Matrix shift = a_bar + Matrix::Identity(n, n);
    Eigen::PartialPivLU<Matrix> lu(shift);
    const Matrix inv = lu.inverse();
    const double cond = norm_inf(shift) * norm_inf(inv);
    if (!std::isfinite(cond) || cond > Tolerances::defaults().condition_limit)
        throw SolverError(SolverErrorKind::SingularShift,
                          "A + I near singular, condition " + brief(cond));
    Matrix ac = lu.solve(Matrix(a_bar - Matrix::Identity(n, n)));
    Matrix bc = std::sqrt(2.0) * lu.solve(b_bar);
    return {std::move(ac), std::move(bc)};
}

ApproximationBound lowrank_gramian_approx(const Matrix& a_bar, const Matrix& b_bar, int l,
                                          const Tolerances& tol) {
    const int n = static_cast<int>(a_bar.rows());
    const int m = static_cast<int>(b_bar.cols());
    if (l < 1 || l > n) throw std::invalid_argument("lowrank_gramian_approx: l out of range");
    if (spectral_radius(a_bar) >= 1.0)
        throw SolverError(SolverErrorKind::NotStable, "plant unstable");

    const Matrix wc = controllability_gramian(a_bar, b_bar, tol);
    const EigenDecomposition eig = eig_decomposition(a_bar, tol);
    const auto [ac, bc] = bilinear_transform(a_bar, b_bar);
    (void)ac;
    const DecayReport decay = cholesky_decay_estimates(eig.eigenvalues, tol);

    // Eigenvector data in pivot order.
    ComplexMatrix xp(n, n), xip(n, n);
    for (int i = 0; i < n; ++i) {
        xp.col(i) = eig.right_eigenvectors.col(decay.pivot_order[i]);
        xip.row(i) = eig.inverse_eigenvectors.row(decay.pivot_order[i]);
    }

    ComplexMatrix w_hat = ComplexMatrix::Zero(n, n);
    std::vector<ComplexVector> weights(m);
    for (int p = 0; p < m; ++p) weights[p] = xip * bc.col(p).cast<Complex>();
    for (int j = 0; j < l; ++j) {
        if (decay.deltas[j] == 0.0) break;
        ComplexMatrix z(n, m);
        for (int p = 0; p < m; ++p)
            z.col(p) = xp * weights[p].cwiseProduct(decay.cholesky_factor_L.col(j));
        w_hat += decay.deltas[j] * z * z.adjoint();
    }

    ApproximationBound out;
    out.l = l;
    out.rank_limit = l * m;
    out.epsilon = decay.delta_ratios[l - 1];
    out.W_hat = w_hat.real();
    out.actual_error = norm_inf(Matrix(wc - out.W_hat));
    const double b1 = norm_1(bc);
    out.bound = out.epsilon * decay.deltas[0] * (static_cast<double>(m) * n) * (n - l) *
                std::pow(eig.condition_number_inf * b1, 2.0);
    out.satisfied = out.actual_error <= out.bound;

    const double re_scale = std::max(out.W_hat.cwiseAbs().maxCoeff(), 1e-300);
    out.imag_rel = w_hat.imag().cwiseAbs().maxCoeff() / re_scale;

    Eigen::JacobiSVD<ComplexMatrix> svd(w_hat);
    const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    out.numerical_rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-10 * top) ++out.numerical_rank;

    out.prefix_conjugate_closed = true;
    for (int i = 0; i < l && out.prefix_conjugate_closed; ++i) {
        const Complex v = decay.ordered_eigenvalues(i);
        if (v.imag() == 0.0) continue;
        bool found = false;
        for (int j = 0; j < l; ++j)
            if (decay.ordered_eigenvalues(j) == std::conj(v)) found = true;
        out.prefix_conjugate_closed = found;
    }
    return out;
}

StageAnalysis analyze_stage(const StageSolution& stage, std::vector<int> l_grid,
                            const Tolerances& tol) {
    const AugmentedPlant& plant = stage.plant;
    StageAnalysis analysis;

    analysis.gramians.Wc = controllability_gramian(plant.A_bar, plant.B_bar, tol);
    analysis.gramians.Wo = observability_gramian(plant.A_bar, plant.C_bar, tol);
    analysis.gramians.eigenvalues_c = descending_sym_eigenvalues(analysis.gramians.Wc);
    analysis.gramians.eigenvalues_o = descending_sym_eigenvalues(analysis.gramians.Wo);
    analysis.gramians.hankel =
        hankel_singular_values(analysis.gramians.Wc, analysis.gramians.Wo, tol);

    Eigen::EigenSolver<Matrix> es(plant.A_bar, /*computeEigenvectors=*/false);
    analysis.decay = cholesky_decay_estimates(es.eigenvalues(), tol);
    analysis.decay.gramian_ratios.resize(analysis.gramians.eigenvalues_c.size());
    const double top = analysis.gramians.eigenvalues_c.front();
    for (std::size_t i = 0; i < analysis.gramians.eigenvalues_c.size(); ++i)
        analysis.decay.gramian_ratios[i] = analysis.gramians.eigenvalues_c[i] / top;

    if (l_grid.empty())
        for (int l = 1; l <= plant.state_dim; ++l) l_grid.push_back(l);

    try {
        for (int l : l_grid)
            analysis.bounds.push_back(lowrank_gramian_approx(plant.A_bar, plant.B_bar, l, tol));
    } catch (const SolverError& e) {
        if (e.kind() != SolverErrorKind::Defective) throw;
        analysis.bounds.clear();
        analysis.bounds_skipped_reason = e.what();
    }
    return analysis;
}

}  // namespace asymlq
