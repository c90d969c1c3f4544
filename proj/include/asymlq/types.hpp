#pragma once

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace asymlq {

// Short scientific form for diagnostics.
inline std::string brief(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Induced max-row-sum norm.
template <typename Derived>
double norm_inf(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// Induced max-column-sum norm.
template <typename Derived>
double norm_1(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

// Entrywise max-abs, used for iterate step criteria.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

struct Tolerances {
    double residual = 1e-10;        // relative residual accepted from Lyapunov/Riccati solves
    double riccati_step = 1e-12;    // max-abs change between successive Riccati iterates
    double symmetry = 1e-12;        // relative symmetry drift allowed on returned P, Sigma
    double sign_check = 1e-10;      // eigenvalue slack for definiteness checks
    double kappa_gate = 1e10;       // eigenvector condition number above which a matrix is treated as defective
    double condition_limit = 1e12;  // linear-solve condition estimate treated as singular
    int max_riccati_iterations = 100000;

    // Default tolerances; ASYMLQ_TOL overrides the residual tolerance.
    static const Tolerances& defaults() {
        static const Tolerances t = [] {
            Tolerances d;
            if (const char* env = std::getenv("ASYMLQ_TOL")) {
                char* end = nullptr;
                const double v = std::strtod(env, &end);
                if (end != env && v > 0.0) d.residual = v;
            }
            return d;
        }();
        return t;
    }
};

enum class SolverErrorKind {
    NotStable,
    NoConvergence,
    NotStabilizing,
    ValueUnbounded,
    Defective,
    NotPsd,
    SingularShift,
    R2SearchFailed,
};

inline const char* to_string(SolverErrorKind k) {
    switch (k) {
        case SolverErrorKind::NotStable: return "NotStable";
        case SolverErrorKind::NoConvergence: return "NoConvergence";
        case SolverErrorKind::NotStabilizing: return "NotStabilizing";
        case SolverErrorKind::ValueUnbounded: return "ValueUnbounded";
        case SolverErrorKind::Defective: return "Defective";
        case SolverErrorKind::NotPsd: return "NotPsd";
        case SolverErrorKind::SingularShift: return "SingularShift";
        case SolverErrorKind::R2SearchFailed: return "R2SearchFailed";
    }
    return "Unknown";
}

class SolverError : public std::runtime_error {
public:
    SolverError(SolverErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    SolverErrorKind kind() const { return kind_; }

private:
    SolverErrorKind kind_;
};

}  // namespace asymlq
