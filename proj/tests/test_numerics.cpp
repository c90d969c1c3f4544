#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "asymlq/game_model.hpp"
#include "asymlq/numerics.hpp"
#include "asymlq/rng.hpp"
#include "oracles.hpp"

using namespace asymlq;

namespace {
Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
}  // namespace

TEST_CASE("spectral radius") {
    CHECK(spectral_radius(Matrix::Identity(2, 2)) == doctest::Approx(1.0));
    CHECK(spectral_radius(Matrix::Zero(3, 3)) == doctest::Approx(0.0));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.3;
    d(1, 1) = -0.9;
    CHECK(spectral_radius(d) == doctest::Approx(0.9));
}

TEST_CASE("discrete Lyapunov solve") {
    SUBCASE("scalar closed form") {
        const Matrix p = solve_dlyap(scalar(0.5), scalar(1.0));
        CHECK(p(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("zero right-hand side") {
        const Matrix p = solve_dlyap(example_game().A, Matrix::Zero(2, 2));
        CHECK(max_abs(p) == 0.0);
    }
    SUBCASE("2x2 system vs frozen series values") {
        const Matrix p = solve_dlyap(example_game().A, Matrix::Identity(2, 2));
        // From the 1e4-term partial-sum oracle.
        CHECK(std::abs(p(0, 0) - 1.7352220018523554) < 1e-10);
        CHECK(std::abs(p(0, 1) - -0.25798243013252126) < 1e-10);
        CHECK(std::abs(p(1, 0) - -0.25798243013252126) < 1e-10);
        CHECK(std::abs(p(1, 1) - 1.5582591762475626) < 1e-10);
        const Matrix series = oracles::dlyap_series(example_game().A, Matrix::Identity(2, 2));
        CHECK(norm_inf(Matrix(p - series)) < 1e-10);
    }
    SUBCASE("unstable input rejected") {
        CHECK_THROWS_AS(solve_dlyap(scalar(1.0), scalar(1.0)), SolverError);
        try {
            solve_dlyap(scalar(1.2), scalar(1.0));
        } catch (const SolverError& e) {
            CHECK(e.kind() == SolverErrorKind::NotStable);
        }
    }
    SUBCASE("matches series oracle on random stable systems") {
        NormalSampler rng(20240810);
        auto draw = [&] { return rng(); };
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 1 + static_cast<int>(splitmix64(trial) % 6);
            const Matrix a = oracles::random_stable(draw, n, 0.2 + 0.7 * (trial % 7) / 6.0);
            Matrix g(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) g(i, j) = draw();
            const Matrix q = symmetrize(g * g.transpose());
            const Matrix p = solve_dlyap(a, q);
            const Matrix series = oracles::dlyap_series(a, q);
            CHECK(norm_inf(Matrix(p - series)) <= 1e-8 * std::max(1.0, norm_inf(series)));
            CHECK(norm_inf(Matrix(p - p.transpose())) <= 1e-12 * std::max(1.0, norm_inf(p)));
        }
    }
}

TEST_CASE("control DARE") {
    SUBCASE("golden ratio scalar case") {
        const RiccatiSolution sol =
            solve_dare_control(scalar(1.0), scalar(1.0), scalar(1.0), scalar(1.0),
                               RiccatiRole::Minimizer);
        const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
        CHECK(std::abs(sol.P(0, 0) - phi) < 1e-10);
        CHECK(std::abs(sol.gain(0, 0) - -(phi / (1.0 + phi))) < 1e-10);
        CHECK(sol.closed_loop_spectral_radius < 1.0);
        CHECK(sol.residual <= 1e-10);
    }
    SUBCASE("maximizer scalar case picks the stabilizing root") {
        const RiccatiSolution sol =
            solve_dare_control(scalar(0.5), scalar(1.0), scalar(1.0), scalar(-7.5),
                               RiccatiRole::Maximizer);
        // Stabilizing root of p^2 - 6.625 p + 7.5 = 0.
        const double p_root = (6.625 - std::sqrt(6.625 * 6.625 - 4.0 * 7.5)) / 2.0;
        CHECK(std::abs(sol.P(0, 0) - p_root) < 1e-8);
        CHECK(std::abs(sol.P(0, 0) - 1.4489935605155533) < 1e-8);
        CHECK(sol.gain(0, 0) == doctest::Approx(0.11973161613748087).epsilon(1e-8));
        CHECK(sol.closed_loop_spectral_radius == doctest::Approx(0.61973161613748085));
        const double oracle = oracles::scalar_dare_value_iteration(0.5, 1.0, 1.0, -7.5);
        CHECK(std::abs(sol.P(0, 0) - oracle) < 1e-8);
        // Boundedness condition.
        CHECK(-7.5 + sol.P(0, 0) < 0.0);
    }
    SUBCASE("maximizer with too-small penalty is unbounded") {
        try {
            solve_dare_control(scalar(0.5), scalar(1.0), scalar(1.0), scalar(-0.01),
                               RiccatiRole::Maximizer);
            FAIL("expected ValueUnbounded");
        } catch (const SolverError& e) {
            CHECK(e.kind() == SolverErrorKind::ValueUnbounded);
        }
    }
    SUBCASE("zero input matrix reduces to Lyapunov") {
        const GameSpec ex = example_game();
        const Matrix b = Matrix::Zero(2, 1);
        const RiccatiSolution sol =
            solve_dare_control(ex.A, b, Matrix::Identity(2, 2), scalar(1.0),
                               RiccatiRole::Minimizer);
        const Matrix lyap = solve_dlyap(ex.A, Matrix::Identity(2, 2));
        CHECK(norm_inf(Matrix(sol.P - lyap)) < 1e-10);
        CHECK(max_abs(sol.gain) == 0.0);
    }
}

TEST_CASE("filter DARE") {
    SUBCASE("scalar duality with the golden ratio") {
        const RiccatiSolution sol =
            solve_dare_filter(scalar(1.0), scalar(1.0), scalar(1.0), scalar(1.0));
        const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
        CHECK(std::abs(sol.P(0, 0) - phi) < 1e-10);
        CHECK(std::abs(sol.gain(0, 0) - phi / (1.0 + phi)) < 1e-10);
    }
    SUBCASE("zero output matrix reduces to dual Lyapunov") {
        const GameSpec ex = example_game();
        const Matrix c = Matrix::Zero(1, 2);
        const RiccatiSolution sol = solve_dare_filter(ex.A, c, ex.W, scalar(1.0));
        const Matrix lyap = solve_dlyap(ex.A.transpose(), ex.W);
        CHECK(norm_inf(Matrix(sol.P - lyap)) < 1e-10);
        CHECK(max_abs(sol.gain) == 0.0);
    }
    SUBCASE("control-filter duality on random instances") {
        NormalSampler rng(555);
        auto draw = [&] { return rng(); };
        for (int trial = 0; trial < 100; ++trial) {
            const int n = 1 + static_cast<int>(splitmix64(900 + trial) % 4);
            const int p = 1 + static_cast<int>(splitmix64(1800 + trial) % 2);
            const Matrix a = oracles::random_stable(draw, n, 0.95);
            Matrix c(p, n), gw(n, n), gv(p, p);
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < n; ++j) c(i, j) = draw();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) gw(i, j) = draw();
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j) gv(i, j) = draw();
            const Matrix w = symmetrize(gw * gw.transpose()) + 1e-6 * Matrix::Identity(n, n);
            const Matrix v = symmetrize(gv * gv.transpose()) + 1e-6 * Matrix::Identity(p, p);
            const RiccatiSolution filt = solve_dare_filter(a, c, w, v);
            const RiccatiSolution ctrl = solve_dare_control(
                a.transpose(), c.transpose(), w, v, RiccatiRole::Minimizer);
            CHECK(norm_inf(Matrix(filt.P - ctrl.P)) <= 1e-8 * std::max(1.0, norm_inf(ctrl.P)));
            CHECK(norm_inf(Matrix(filt.gain + ctrl.gain.transpose())) <=
                  1e-8 * std::max(1.0, norm_inf(filt.gain)));
            CHECK(norm_inf(Matrix(filt.P - filt.P.transpose())) <=
                  1e-12 * std::max(1.0, norm_inf(filt.P)));
        }
    }
}

TEST_CASE("eigendecomposition") {
    SUBCASE("diagonal matrix") {
        Matrix d = Matrix::Zero(2, 2);
        d(0, 0) = 0.5;
        d(1, 1) = 0.25;
        const EigenDecomposition e = eig_decomposition(d);
        std::vector<double> mags{std::abs(e.eigenvalues(0)), std::abs(e.eigenvalues(1))};
        std::sort(mags.rbegin(), mags.rend());
        CHECK(mags[0] == doctest::Approx(0.5));
        CHECK(mags[1] == doctest::Approx(0.25));
        CHECK(e.condition_number_inf == doctest::Approx(1.0));
    }
    SUBCASE("rotation-like matrix has imaginary pair") {
        Matrix r(2, 2);
        r << 0.0, -0.5, 0.5, 0.0;
        const EigenDecomposition e = eig_decomposition(r);
        CHECK(std::abs(e.eigenvalues(0).real()) < 1e-14);
        CHECK(std::abs(std::abs(e.eigenvalues(0).imag()) - 0.5) < 1e-14);
    }
    SUBCASE("2x2 example matches characteristic-polynomial roots") {
        const Matrix a = example_game().A;
        const double tr = a.trace(), det = a.determinant();
        const Complex disc = std::sqrt(Complex(tr * tr - 4.0 * det, 0.0));
        const Complex r1 = (tr + disc) / 2.0, r2 = (tr - disc) / 2.0;
        const EigenDecomposition e = eig_decomposition(a);
        for (int i = 0; i < 2; ++i) {
            const double d1 = std::abs(e.eigenvalues(i) - r1);
            const double d2 = std::abs(e.eigenvalues(i) - r2);
            CHECK(std::min(d1, d2) < 1e-10);
        }
        // Residual and inverse quality.
        CHECK(norm_inf(ComplexMatrix(a.cast<Complex>() * e.right_eigenvectors -
                                     e.right_eigenvectors * e.eigenvalues.asDiagonal())) < 1e-12);
        CHECK(norm_inf(ComplexMatrix(e.right_eigenvectors * e.inverse_eigenvectors -
                                     ComplexMatrix::Identity(2, 2))) < 1e-12);
        for (int j = 0; j < 2; ++j)
            CHECK(e.right_eigenvectors.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("defective matrix rejected") {
        Matrix jordan(2, 2);
        jordan << 0.5, 1.0, 0.0, 0.5;
        CHECK_THROWS_AS(eig_decomposition(jordan), SolverError);
    }
}
