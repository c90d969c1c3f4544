#include "asymlq/game_model.hpp"

#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "asymlq/best_response.hpp"
#include "asymlq/numerics.hpp"
#include "asymlq/rng.hpp"

namespace asymlq {

using json = nlohmann::ordered_json;

GameSpec example_game() {
    GameSpec s;
    s.dims = {2, 1, 1, 1, 1};
    s.A = Matrix(2, 2);
    s.A << -0.3063, -0.3580, 0.5575, -0.5273;
    s.B1 = Matrix(2, 1);
    s.B1 << 1.0, 1.0;
    s.B2 = s.B1;
    s.C1 = Matrix(1, 2);
    s.C1 << 1.0, 1.0;
    s.C2 = s.C1;
    s.W = Matrix::Identity(2, 2);
    s.V1 = Matrix::Constant(1, 1, 1.0);
    s.V2 = s.V1;
    s.Q = Matrix::Identity(2, 2);
    s.R1 = Matrix::Constant(1, 1, 1.0);
    s.R2 = Matrix::Constant(1, 1, -7.5);
    s.x0_mean = Vector::Zero(2);
    s.X0 = Matrix::Identity(2, 2);
    return s;
}

namespace {

double min_sym_eig(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}
double max_sym_eig(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

void check_shape(std::vector<ValidationIssue>& out, const char* name, const Matrix& m,
                 int rows, int cols) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream msg;
        msg << name << " is " << m.rows() << "x" << m.cols() << ", expected " << rows << "x"
            << cols;
        out.push_back({"shape mismatch", msg.str()});
    }
}

void check_symmetric(std::vector<ValidationIssue>& out, const char* name, const Matrix& m,
                     double tol) {
    if (m.rows() != m.cols()) return;  // reported as a shape issue
    const double drift = norm_inf(m - m.transpose());
    if (drift > tol * std::max(1.0, norm_inf(m)))
        out.push_back({std::string(name) + " not symmetric",
                       std::string(name) + " asymmetry " + brief(drift)});
}

void check_finite(std::vector<ValidationIssue>& out, const char* name, const Matrix& m) {
    if (!m.allFinite()) out.push_back({std::string(name) + " not finite", "non-finite entries"});
}

}  // namespace

ValidationReport validate(const GameSpec& spec, const Tolerances& tol) {
    ValidationReport report;
    auto& v = report.violations;
    const auto [n, m1, m2, p1, p2] = spec.dims;

    if (n < 1 || m1 < 1 || m2 < 1 || p1 < 1 || p2 < 1)
        v.push_back({"dims", "all dimensions must be >= 1"});

    check_shape(v, "A", spec.A, n, n);
    check_shape(v, "B1", spec.B1, n, m1);
    check_shape(v, "B2", spec.B2, n, m2);
    check_shape(v, "C1", spec.C1, p1, n);
    check_shape(v, "C2", spec.C2, p2, n);
    check_shape(v, "W", spec.W, n, n);
    check_shape(v, "V1", spec.V1, p1, p1);
    check_shape(v, "V2", spec.V2, p2, p2);
    check_shape(v, "Q", spec.Q, n, n);
    check_shape(v, "R1", spec.R1, m1, m1);
    check_shape(v, "R2", spec.R2, m2, m2);
    if (spec.x0_mean.size() != n)
        v.push_back({"shape mismatch", "x0_mean has length " +
                                           std::to_string(spec.x0_mean.size()) + ", expected " +
                                           std::to_string(n)});
    check_shape(v, "X0", spec.X0, n, n);
    if (!v.empty()) return report;  // eigenvalue checks need consistent shapes

    for (const auto& [name, m] :
         {std::pair<const char*, const Matrix*>{"A", &spec.A}, {"B1", &spec.B1},
          {"B2", &spec.B2}, {"C1", &spec.C1}, {"C2", &spec.C2}, {"W", &spec.W},
          {"V1", &spec.V1}, {"V2", &spec.V2}, {"Q", &spec.Q}, {"R1", &spec.R1},
          {"R2", &spec.R2}, {"X0", &spec.X0}})
        check_finite(v, name, *m);

    check_symmetric(v, "W", spec.W, tol.sign_check);
    check_symmetric(v, "V1", spec.V1, tol.sign_check);
    check_symmetric(v, "V2", spec.V2, tol.sign_check);
    check_symmetric(v, "Q", spec.Q, tol.sign_check);
    check_symmetric(v, "R1", spec.R1, tol.sign_check);
    check_symmetric(v, "R2", spec.R2, tol.sign_check);
    check_symmetric(v, "X0", spec.X0, tol.sign_check);
    if (!v.empty()) {
        report.ok = false;
        return report;
    }

    const double slack = tol.sign_check;
    auto psd = [&](const char* name, const Matrix& m) {
        const double lo = min_sym_eig(m);
        if (lo < -slack)
            v.push_back({std::string(name) + " not PSD",
                         "min eigenvalue " + brief(lo)});
    };
    auto pd = [&](const char* name, const Matrix& m) {
        const double lo = min_sym_eig(m);
        if (lo <= -slack)
            v.push_back({std::string(name) + " not PD",
                         "min eigenvalue " + brief(lo)});
    };
    auto nd = [&](const char* name, const Matrix& m) {
        const double hi = max_sym_eig(m);
        if (hi >= slack)
            v.push_back({std::string(name) + " not ND",
                         "max eigenvalue " + brief(hi)});
    };
    psd("W", spec.W);
    psd("Q", spec.Q);
    psd("X0", spec.X0);
    pd("V1", spec.V1);
    pd("V2", spec.V2);
    pd("R1", spec.R1);
    nd("R2", spec.R2);

    report.ok = v.empty();
    return report;
}

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ParseError("field \"" + field + "\": expected a nested array of rows");
    const auto rows = j.size();
    const auto cols = j[0].size();
    if (cols == 0) throw ParseError("field \"" + field + "\": empty row");
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ParseError("field \"" + field + "\": ragged rows");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[i][c].is_number())
                throw ParseError("field \"" + field + "\": non-numeric entry at row " +
                                 std::to_string(i));
            m(i, c) = j[i][c].get<double>();
        }
    }
    return m;
}

const json& require_field(const json& j, const std::string& field) {
    auto it = j.find(field);
    if (it == j.end()) throw ParseError("missing field \"" + field + "\"");
    return *it;
}

}  // namespace

std::string spec_to_json_text(const GameSpec& spec) {
    json j;
    j["dims"] = {{"n", spec.dims.n}, {"m1", spec.dims.m1}, {"m2", spec.dims.m2},
                 {"p1", spec.dims.p1}, {"p2", spec.dims.p2}};
    j["A"] = matrix_to_json(spec.A);
    j["B1"] = matrix_to_json(spec.B1);
    j["B2"] = matrix_to_json(spec.B2);
    j["C1"] = matrix_to_json(spec.C1);
    j["C2"] = matrix_to_json(spec.C2);
    j["W"] = matrix_to_json(spec.W);
    j["V1"] = matrix_to_json(spec.V1);
    j["V2"] = matrix_to_json(spec.V2);
    j["Q"] = matrix_to_json(spec.Q);
    j["R1"] = matrix_to_json(spec.R1);
    j["R2"] = matrix_to_json(spec.R2);
    j["x0_mean"] = matrix_to_json(spec.x0_mean.transpose());
    j["X0"] = matrix_to_json(spec.X0);
    return j.dump(2) + "\n";
}

GameSpec spec_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    GameSpec spec;
    const json& dims = require_field(j, "dims");
    for (const char* f : {"n", "m1", "m2", "p1", "p2"})
        if (!dims.contains(f) || !dims[f].is_number_integer())
            throw ParseError(std::string("dims.") + f + " missing or not an integer");
    spec.dims = {dims["n"].get<int>(), dims["m1"].get<int>(), dims["m2"].get<int>(),
                 dims["p1"].get<int>(), dims["p2"].get<int>()};

    spec.A = matrix_from_json(require_field(j, "A"), "A");
    spec.B1 = matrix_from_json(require_field(j, "B1"), "B1");
    spec.B2 = matrix_from_json(require_field(j, "B2"), "B2");
    spec.C1 = matrix_from_json(require_field(j, "C1"), "C1");
    spec.C2 = matrix_from_json(require_field(j, "C2"), "C2");
    spec.W = matrix_from_json(require_field(j, "W"), "W");
    spec.V1 = matrix_from_json(require_field(j, "V1"), "V1");
    spec.V2 = matrix_from_json(require_field(j, "V2"), "V2");
    spec.Q = matrix_from_json(require_field(j, "Q"), "Q");
    spec.R1 = matrix_from_json(require_field(j, "R1"), "R1");
    spec.R2 = matrix_from_json(require_field(j, "R2"), "R2");
    if (j.contains("x0_mean")) {
        Matrix m = matrix_from_json(j["x0_mean"], "x0_mean");
        if (m.rows() == 1) m = m.transpose().eval();
        if (m.cols() != 1) throw ParseError("field \"x0_mean\": expected a vector");
        spec.x0_mean = m.col(0);
    } else {
        spec.x0_mean = Vector::Zero(spec.dims.n);
    }
    if (j.contains("X0"))
        spec.X0 = matrix_from_json(j["X0"], "X0");
    else
        spec.X0 = Matrix::Identity(spec.dims.n, spec.dims.n);

    const ValidationReport report = validate(spec);
    if (!report.ok) {
        std::string msg = "model failed validation:";
        for (const auto& viol : report.violations) msg += " [" + viol.check + "]";
        throw ValidationError(msg, report);
    }
    return spec;
}

GameSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return spec_from_json_text(buf.str());
}

void save_spec(const GameSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open \"" + path + "\" for writing");
    out << spec_to_json_text(spec);
    if (!out) throw ParseError("write failed for \"" + path + "\"");
}

GameSpec random_instance(std::uint64_t seed, const GameDims& dims, double spectral_target,
                         double r2_scale_start, const Tolerances& tol) {
    if (dims.n < 1 || dims.m1 < 1 || dims.m2 < 1 || dims.p1 < 1 || dims.p2 < 1)
        throw std::invalid_argument("random_instance: dims must be positive");
    if (!(spectral_target > 0.0 && spectral_target < 1.0))
        throw std::invalid_argument("random_instance: spectral_target must be in (0,1)");
    if (!(r2_scale_start > 0.0))
        throw std::invalid_argument("random_instance: r2_scale_start must be positive");

    NormalSampler rng(seed);
    auto draw = [&](int rows, int cols) {
        Matrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = rng();
        return m;
    };
    auto draw_psd = [&](int d) {
        const Matrix g = draw(d, d);
        return Matrix(g * g.transpose() + 1e-6 * Matrix::Identity(d, d));
    };

    GameSpec spec;
    spec.dims = dims;
    spec.A = draw(dims.n, dims.n);
    const double rho = spectral_radius(spec.A);
    if (rho <= 0.0)
        throw SolverError(SolverErrorKind::NoConvergence, "drawn A is nilpotent, cannot scale");
    spec.A *= spectral_target / rho;
    spec.B1 = draw(dims.n, dims.m1);
    spec.B2 = draw(dims.n, dims.m2);
    spec.C1 = draw(dims.p1, dims.n);
    spec.C2 = draw(dims.p2, dims.n);
    spec.W = draw_psd(dims.n);
    spec.V1 = draw_psd(dims.p1);
    spec.V2 = draw_psd(dims.p2);
    spec.Q = draw_psd(dims.n);
    spec.R1 = draw_psd(dims.m1);
    spec.x0_mean = Vector::Zero(dims.n);
    spec.X0 = Matrix::Identity(dims.n, dims.n);

    // Size R2 by doubling until the first maximizer best response is bounded.
    const StageSolution min_stage = minimizer_initial(spec, tol);
    double scale = r2_scale_start;
    for (int attempt = 0; attempt < 30; ++attempt) {
        spec.R2 = -scale * Matrix::Identity(dims.m2, dims.m2);
        try {
            const AugmentedPlant plant = augment_for_max(spec, min_stage);
            lqg_best_response(plant, spec.V2, tol);
            return spec;
        } catch (const SolverError& e) {
            if (e.kind() != SolverErrorKind::ValueUnbounded) throw;
            scale *= 2.0;
        }
    }
    throw SolverError(SolverErrorKind::R2SearchFailed,
                      "no bounded maximizer response within 30 doublings from " +
                          brief(r2_scale_start));
}

}  // namespace asymlq
