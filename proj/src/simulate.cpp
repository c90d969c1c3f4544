#include "asymlq/simulate.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "asymlq/rng.hpp"

namespace asymlq {

namespace {

// Symmetric PSD factor S with S S' = M; tiny negative eigenvalues clamped.
Matrix covariance_factor(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
    Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal();
}

}  // namespace

McEstimate monte_carlo_cost(const GameSpec& spec, const GameTrace& trace, std::int64_t steps,
                            std::uint64_t seed, std::int64_t burn_in, const Tolerances& tol) {
    (void)tol;
    if (steps <= burn_in || burn_in < 0)
        throw std::invalid_argument("monte_carlo_cost: need steps > burn_in >= 0");
    const StageSolution* s1 = trace.last_stage_of(Player::Minimizer);
    const StageSolution* s2 = trace.last_stage_of(Player::Maximizer);
    if (!s1 || !s2)
        throw std::invalid_argument("monte_carlo_cost: trace needs a stage for each player");

    const int n = spec.dims.n;
    const int p1 = spec.dims.p1, p2 = spec.dims.p2;
    const int d1 = s1->plant.state_dim, d2 = s2->plant.state_dim;
    const int dim = n + d1 + d2;
    const int noise_dim = n + p1 + p2;

    // Joint closed loop over [x; z1; z2] driven by [w; v1; v2].
    Matrix step = Matrix::Zero(dim, dim);
    step.block(0, 0, n, n) = spec.A;
    step.block(0, n, n, d1) = spec.B1 * s1->K;
    step.block(0, n + d1, n, d2) = spec.B2 * s2->K;
    step.block(n, 0, d1, n) = s1->L * spec.C1;
    step.block(n, n, d1, d1) =
        s1->plant.A_bar + s1->plant.B_bar * s1->K - s1->L * s1->plant.C_bar;
    step.block(n + d1, 0, d2, n) = s2->L * spec.C2;
    step.block(n + d1, n + d1, d2, d2) =
        s2->plant.A_bar + s2->plant.B_bar * s2->K - s2->L * s2->plant.C_bar;

    const double joint_radius = spectral_radius(step);
    if (joint_radius >= 1.0)
        throw SolverError(SolverErrorKind::NotStable,
                          "joint closed loop rho = " + brief(joint_radius));

    Matrix noise_gain = Matrix::Zero(dim, noise_dim);
    noise_gain.block(0, 0, n, n) = covariance_factor(spec.W);
    noise_gain.block(n, n, d1, p1) = s1->L * covariance_factor(spec.V1);
    noise_gain.block(n + d1, n + p1, d2, p2) = s2->L * covariance_factor(spec.V2);

    Matrix cost_form = Matrix::Zero(dim, dim);
    cost_form.block(0, 0, n, n) = spec.Q;
    cost_form.block(n, n, d1, d1) = s1->K.transpose() * spec.R1 * s1->K;
    cost_form.block(n + d1, n + d1, d2, d2) = s2->K.transpose() * spec.R2 * s2->K;

    NormalSampler rng(seed);
    Vector state = Vector::Zero(dim);
    {
        const Matrix x0_factor = covariance_factor(spec.X0);
        Vector z(n);
        for (int i = 0; i < n; ++i) z(i) = rng();
        state.head(n) = spec.x0_mean + x0_factor * z;
    }

    const std::int64_t post = steps - burn_in;
    const std::int64_t batches = std::min<std::int64_t>(100, post);
    const std::int64_t batch_len = post / batches;
    const std::int64_t used = batches * batch_len;

    Vector xi(noise_dim), next(dim);
    std::vector<double> batch_mean(batches, 0.0);
    double total = 0.0;
    std::int64_t kept = 0;
    for (std::int64_t t = 0; t < burn_in + used; ++t) {
        if (t >= burn_in) {
            const double c = state.dot(cost_form * state);
            total += c;
            batch_mean[kept / batch_len] += c;
            ++kept;
        }
        for (int i = 0; i < noise_dim; ++i) xi(i) = rng();
        next.noalias() = step * state;
        next.noalias() += noise_gain * xi;
        state.swap(next);
    }

    McEstimate est;
    est.steps = used;
    est.seed = seed;
    est.mean_cost = total / static_cast<double>(used);
    double var = 0.0;
    for (auto& b : batch_mean) {
        b /= static_cast<double>(batch_len);
        var += (b - est.mean_cost) * (b - est.mean_cost);
    }
    if (batches > 1) {
        var /= static_cast<double>(batches - 1);
        est.std_error = std::sqrt(var / static_cast<double>(batches));
    }
    return est;
}

}  // namespace asymlq
