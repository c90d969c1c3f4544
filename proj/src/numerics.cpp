#include "asymlq/numerics.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace asymlq {

double spectral_radius(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("spectral_radius: matrix not square");
    if (a.size() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace detail {

Matrix solve_linear(const Matrix& m, const Matrix& b, const Tolerances& tol) {
    Eigen::PartialPivLU<Matrix> lu(m);
    const Matrix inv = lu.inverse();
    const double cond = norm_inf(m) * norm_inf(inv);
    if (!std::isfinite(cond) || cond > tol.condition_limit) {
        throw SolverError(SolverErrorKind::NoConvergence,
                          "linear solve near singular (condition estimate " +
                              brief(cond) + ")");
    }
    return lu.solve(b);
}

}  // namespace detail

Matrix solve_dlyap(const Matrix& a, const Matrix& q, const Tolerances& tol) {
    if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows())
        throw std::invalid_argument("solve_dlyap: dimension mismatch");
    const double rho = spectral_radius(a);
    if (rho >= 1.0)
        throw SolverError(SolverErrorKind::NotStable,
                          "rho(A) = " + brief(rho) + " >= 1");

    // Doubling: S <- S + E'SE, E <- E^2 accumulates sum_t (A')^t Q A^t.
    Matrix s = symmetrize(q);
    Matrix e = a;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        const Matrix ds = e.transpose() * s * e;
        s = symmetrize(s + ds);
        if (max_abs(ds) <= 1e-16 * std::max(1.0, max_abs(s))) {
            converged = true;
            break;
        }
        e = e * e;
    }
    const double scale = std::max(1.0, norm_inf(q));
    const double residual = norm_inf(s - a.transpose() * s * a - q) / scale;
    if (!converged || !(residual <= tol.residual))
        throw SolverError(SolverErrorKind::NoConvergence,
                          "dlyap residual " + brief(residual));
    return s;
}

EigenDecomposition eig_decomposition(const Matrix& a, const Tolerances& tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eig_decomposition: matrix not square");
    Eigen::EigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success)
        throw SolverError(SolverErrorKind::Defective, "eigensolver failed to converge");

    EigenDecomposition d;
    d.eigenvalues = es.eigenvalues();
    d.right_eigenvectors = es.eigenvectors();
    for (Eigen::Index j = 0; j < d.right_eigenvectors.cols(); ++j) {
        const double nrm = d.right_eigenvectors.col(j).norm();
        if (nrm > 0) d.right_eigenvectors.col(j) /= nrm;
    }

    Eigen::PartialPivLU<ComplexMatrix> lu(d.right_eigenvectors);
    d.inverse_eigenvectors = lu.inverse();
    d.condition_number_inf = norm_inf(d.right_eigenvectors) * norm_inf(d.inverse_eigenvectors);
    if (!std::isfinite(d.condition_number_inf) || d.condition_number_inf > tol.kappa_gate)
        throw SolverError(SolverErrorKind::Defective,
                          "eigenvector condition " + brief(d.condition_number_inf) +
                              " exceeds gate");
    return d;
}

namespace {

// Most negative / most positive eigenvalue of a symmetric matrix.
std::pair<double, double> sym_eig_range(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace

RiccatiSolution solve_dare_control(const Matrix& a, const Matrix& b, const Matrix& q,
                                   const Matrix& r, RiccatiRole role, const Tolerances& tol) {
    const auto n = a.rows();
    if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
        r.rows() != b.cols() || r.cols() != b.cols())
        throw std::invalid_argument("solve_dare_control: dimension mismatch");

    const double blow_up = 1e12 * std::max(1.0, max_abs(q));
    Matrix p = symmetrize(q);
    int iterations = 0;
    bool converged = false;
    for (; iterations < tol.max_riccati_iterations; ++iterations) {
        const Matrix s = symmetrize(r + b.transpose() * p * b);
        const auto [smin, smax] = sym_eig_range(s);
        if (role == RiccatiRole::Maximizer && smax >= 0.0)
            throw SolverError(SolverErrorKind::ValueUnbounded,
                              "R + B'PB lost negative definiteness (input weight too small)");
        if (role == RiccatiRole::Minimizer && smin <= 0.0)
            throw SolverError(SolverErrorKind::NoConvergence,
                              "R + B'PB lost positive definiteness");

        const Matrix gain_rhs = detail::solve_linear(s, b.transpose() * p * a, tol);
        Matrix next = symmetrize(q + a.transpose() * p * a -
                                 a.transpose() * p * b * gain_rhs);
        const double step = max_abs(next - p);
        p = next;
        if (step <= tol.riccati_step) {
            converged = true;
            ++iterations;
            break;
        }
        if (max_abs(p) > blow_up) {
            if (role == RiccatiRole::Maximizer)
                throw SolverError(SolverErrorKind::ValueUnbounded, "Riccati iterate diverged");
            throw SolverError(SolverErrorKind::NoConvergence, "Riccati iterate diverged");
        }
    }
    if (!converged)
        throw SolverError(SolverErrorKind::NoConvergence, "Riccati iteration budget exhausted");

    const Matrix s = symmetrize(r + b.transpose() * p * b);
    RiccatiSolution sol;
    sol.P = p;
    sol.gain = -detail::solve_linear(s, b.transpose() * p * a, tol);
    sol.iterations_used = iterations;
    sol.closed_loop_spectral_radius = spectral_radius(a + b * sol.gain);
    const Matrix rhs = q + a.transpose() * p * (a + b * sol.gain);
    sol.residual = norm_inf(p - rhs) / std::max(1.0, norm_inf(p));
    if (sol.closed_loop_spectral_radius >= 1.0)
        throw SolverError(SolverErrorKind::NotStabilizing,
                          "closed loop rho = " + brief(sol.closed_loop_spectral_radius));
    if (!(sol.residual <= tol.residual))
        throw SolverError(SolverErrorKind::NoConvergence,
                          "Riccati residual " + brief(sol.residual));
    return sol;
}

RiccatiSolution solve_dare_filter(const Matrix& a, const Matrix& c, const Matrix& w_eff,
                                  const Matrix& v, const Tolerances& tol) {
    const auto n = a.rows();
    if (a.cols() != n || c.cols() != n || w_eff.rows() != n || w_eff.cols() != n ||
        v.rows() != c.rows() || v.cols() != c.rows())
        throw std::invalid_argument("solve_dare_filter: dimension mismatch");

    const double blow_up = 1e12 * std::max(1.0, max_abs(w_eff));
    Matrix sig = symmetrize(w_eff);
    int iterations = 0;
    bool converged = false;
    for (; iterations < tol.max_riccati_iterations; ++iterations) {
        const Matrix t = symmetrize(v + c * sig * c.transpose());
        const Matrix gain_rhs = detail::solve_linear(t, c * sig * a.transpose(), tol);
        Matrix next = symmetrize(w_eff + a * sig * a.transpose() -
                                 a * sig * c.transpose() * gain_rhs);
        const double step = max_abs(next - sig);
        sig = next;
        if (step <= tol.riccati_step) {
            converged = true;
            ++iterations;
            break;
        }
        if (max_abs(sig) > blow_up)
            throw SolverError(SolverErrorKind::NoConvergence, "filter iterate diverged");
    }
    if (!converged)
        throw SolverError(SolverErrorKind::NoConvergence, "filter iteration budget exhausted");

    const Matrix t = symmetrize(v + c * sig * c.transpose());
    RiccatiSolution sol;
    sol.P = sig;
    sol.gain = detail::solve_linear(t.transpose(), c * sig * a.transpose(), tol).transpose();
    sol.iterations_used = iterations;
    sol.closed_loop_spectral_radius = spectral_radius(a - sol.gain * c);
    const Matrix rhs = w_eff + a * sig * (a - sol.gain * c).transpose();
    sol.residual = norm_inf(sig - rhs) / std::max(1.0, norm_inf(sig));
    if (sol.closed_loop_spectral_radius >= 1.0)
        throw SolverError(SolverErrorKind::NotStabilizing,
                          "estimator loop rho = " +
                              brief(sol.closed_loop_spectral_radius));
    if (!(sol.residual <= tol.residual))
        throw SolverError(SolverErrorKind::NoConvergence,
                          "filter residual " + brief(sol.residual));
    return sol;
}

}  // namespace asymlq
