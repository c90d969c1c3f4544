#include "asymlq/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "asymlq/best_response.hpp"
#include "asymlq/rng.hpp"

namespace asymlq {

using json = nlohmann::ordered_json;

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open \"" + path + "\" for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for \"" + path + "\"");
}

json tolerances_to_json(const Tolerances& tol) {
    return json{{"residual", tol.residual},
                {"riccati_step", tol.riccati_step},
                {"symmetry", tol.symmetry},
                {"sign_check", tol.sign_check},
                {"kappa_gate", tol.kappa_gate},
                {"condition_limit", tol.condition_limit},
                {"max_riccati_iterations", tol.max_riccati_iterations}};
}

}  // namespace

std::vector<std::string> run_example_outputs(const std::string& output_dir,
                                             const Tolerances& tol) {
    namespace fs = std::filesystem;
    fs::create_directories(output_dir);
    const GameSpec spec = example_game();

    BestResponseOptions options;
    options.max_k = 10;
    options.tol = 1e-6;
    options.numerics = tol;
    const GameTrace trace = run_best_response(spec, options);

    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        const std::string path = (fs::path(output_dir) / name).string();
        write_file(path, content);
        written.push_back(path);
    };

    emit("model.json", spec_to_json_text(spec));

    std::string costs = "iteration,player,cost\n";
    for (const auto& stage : trace.stages) {
        costs += std::to_string(stage.plant.order_k) + "," +
                 std::to_string(player_index(stage.plant.player)) + "," +
                 format_number(stage.cost) + "\n";
    }
    emit("costs.csv", costs);

    // Minimizer controllability-Gramian eigenvalue ratios per iteration.
    const int decay_max_k = 5;
    std::string decay_csv = "k,index,eigenvalue_ratio\n";
    const StageSolution* min_k5 = nullptr;
    for (const auto& stage : trace.stages) {
        if (stage.plant.player != Player::Minimizer || stage.plant.order_k > decay_max_k)
            continue;
        const Matrix wc = controllability_gramian(stage.plant.A_bar, stage.plant.B_bar, tol);
        Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(wc), Eigen::EigenvaluesOnly);
        std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + wc.rows());
        std::sort(ev.rbegin(), ev.rend());
        for (std::size_t i = 0; i < ev.size(); ++i)
            decay_csv += std::to_string(stage.plant.order_k) + "," + std::to_string(i + 1) +
                         "," + format_number(ev[i] / ev[0]) + "\n";
        if (stage.plant.order_k == decay_max_k) min_k5 = &stage;
    }
    emit("gramian_decay.csv", decay_csv);

    if (!min_k5)
        throw std::runtime_error("example run did not reach minimizer iteration 5");
    const StageAnalysis analysis = analyze_stage(*min_k5, {1}, tol);
    std::string compare = "index,delta_ratio,gramian_ratio\n";
    for (std::size_t i = 0; i < analysis.decay.delta_ratios.size(); ++i)
        compare += std::to_string(i + 1) + "," + format_number(analysis.decay.delta_ratios[i]) +
                   "," + format_number(analysis.decay.gramian_ratios[i]) + "\n";
    emit("cholesky_compare.csv", compare);

    json manifest;
    manifest["tool"] = "asymlq";
    manifest["version"] = kVersion;
    manifest["command"] = "example";
    manifest["options"] = {{"max_k", options.max_k}, {"tol", options.tol},
                           {"decay_iterations", decay_max_k}};
    manifest["tolerances"] = tolerances_to_json(tol);
    manifest["converged"] = trace.converged;
    manifest["final_relative_change"] = trace.final_relative_change;
    manifest["files"] = {
        {"costs.csv", "iteration,player,cost"},
        {"gramian_decay.csv", "k,index,eigenvalue_ratio (minimizer Wc, per iteration)"},
        {"cholesky_compare.csv", "index,delta_ratio,gramian_ratio (minimizer, iteration 5)"},
        {"model.json", "game model"}};
    emit("manifest.json", manifest.dump(2) + "\n");
    return written;
}

namespace {

struct InstanceOutcome {
    bool ok = false;
    std::string reason;
    // normalized spectra, one vector per tracked quantity
    std::vector<double> wc1, wo1, wc2, wo2, h1, h2;
};

std::vector<double> normalized(const std::vector<double>& values) {
    std::vector<double> out(values.size());
    const double top = std::abs(values.empty() ? 1.0 : values.front());
    const double denom = top > 0.0 ? top : 1.0;
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / denom;
    return out;
}

InstanceOutcome run_suite_instance(std::uint64_t seed, const SuiteOptions& options,
                                   const Tolerances& tol) {
    InstanceOutcome outcome;
    try {
        const GameSpec spec = random_instance(seed, options.dims, options.spectral_target,
                                              options.r2_scale_start, tol);
        BestResponseOptions br;
        br.max_k = options.iterations;
        br.tol = 1e-6;
        br.stop_on_convergence = false;
        br.numerics = tol;
        const GameTrace trace = run_best_response(spec, br);

        for (const Player player : {Player::Minimizer, Player::Maximizer}) {
            const StageSolution* stage = trace.last_stage_of(player);
            if (!stage) throw SolverError(SolverErrorKind::NoConvergence, "missing final stage");
            const Matrix wc = controllability_gramian(stage->plant.A_bar, stage->plant.B_bar, tol);
            const Matrix wo = observability_gramian(stage->plant.A_bar, stage->plant.C_bar, tol);
            Eigen::SelfAdjointEigenSolver<Matrix> ec(symmetrize(wc), Eigen::EigenvaluesOnly);
            Eigen::SelfAdjointEigenSolver<Matrix> eo(symmetrize(wo), Eigen::EigenvaluesOnly);
            std::vector<double> evc(ec.eigenvalues().data(), ec.eigenvalues().data() + wc.rows());
            std::vector<double> evo(eo.eigenvalues().data(), eo.eigenvalues().data() + wo.rows());
            std::sort(evc.rbegin(), evc.rend());
            std::sort(evo.rbegin(), evo.rend());
            const std::vector<double> hsv = hankel_singular_values(wc, wo, tol);
            if (player == Player::Minimizer) {
                outcome.wc1 = normalized(evc);
                outcome.wo1 = normalized(evo);
                outcome.h1 = normalized(hsv);
            } else {
                outcome.wc2 = normalized(evc);
                outcome.wo2 = normalized(evo);
                outcome.h2 = normalized(hsv);
            }
        }
        outcome.ok = true;
    } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.reason = e.what();
    }
    return outcome;
}

}  // namespace

SuiteStats run_random_suite(const SuiteOptions& options, const Tolerances& tol) {
    if (options.count < 1) throw std::invalid_argument("run_random_suite: count must be >= 1");
    for (std::size_t i = 1; i < options.thresholds.size(); ++i)
        if (options.thresholds[i] >= options.thresholds[i - 1])
            throw std::invalid_argument("run_random_suite: thresholds must be descending");

    std::vector<InstanceOutcome> outcomes(options.count);
    const int workers = std::max(1, options.parallelism);
    if (workers == 1) {
        for (int i = 0; i < options.count; ++i)
            outcomes[i] =
                run_suite_instance(splitmix64(options.seed + static_cast<std::uint64_t>(i)),
                                   options, tol);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> cursor{0};
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const int i = cursor.fetch_add(1);
                    if (i >= options.count) return;
                    outcomes[i] = run_suite_instance(
                        splitmix64(options.seed + static_cast<std::uint64_t>(i)), options, tol);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    SuiteStats stats;
    stats.instance_count = options.count;
    stats.iterations_per_instance = options.iterations;
    stats.thresholds = options.thresholds;

    const std::vector<std::pair<std::string, std::vector<double> InstanceOutcome::*>> quantities{
        {"Wc1", &InstanceOutcome::wc1}, {"Wo1", &InstanceOutcome::wo1},
        {"Wc2", &InstanceOutcome::wc2}, {"Wo2", &InstanceOutcome::wo2},
        {"HSV1", &InstanceOutcome::h1}, {"HSV2", &InstanceOutcome::h2}};

    for (int i = 0; i < options.count; ++i) {
        if (!outcomes[i].ok) {
            ++stats.failure_count;
            stats.failures.emplace_back(i, outcomes[i].reason);
        }
    }
    for (const auto& [name, member] : quantities) {
        std::vector<double> fractions(options.thresholds.size(), 0.0);
        std::int64_t pooled = 0;
        for (int i = 0; i < options.count; ++i) {
            if (!outcomes[i].ok) continue;
            for (double v : outcomes[i].*member) {
                ++pooled;
                for (std::size_t t = 0; t < options.thresholds.size(); ++t)
                    if (std::abs(v) < options.thresholds[t]) fractions[t] += 1.0;
            }
        }
        if (pooled > 0)
            for (auto& f : fractions) f /= static_cast<double>(pooled);
        stats.proportions[name] = std::move(fractions);
    }
    return stats;
}

std::string suite_stats_to_json_text(const SuiteStats& stats, const SuiteOptions& options) {
    json j;
    j["tool"] = "asymlq";
    j["version"] = kVersion;
    j["command"] = "suite";
    j["options"] = {{"count", options.count},
                    {"seed", options.seed},
                    {"dims", {{"n", options.dims.n}, {"m1", options.dims.m1},
                              {"m2", options.dims.m2}, {"p1", options.dims.p1},
                              {"p2", options.dims.p2}}},
                    {"iterations", options.iterations},
                    {"spectral_target", options.spectral_target},
                    {"r2_scale_start", options.r2_scale_start},
                    {"normalization", "each spectrum divided by its largest element"},
                    {"aggregation", "values pooled across instances"}};
    j["thresholds"] = stats.thresholds;
    j["instance_count"] = stats.instance_count;
    j["iterations_per_instance"] = stats.iterations_per_instance;
    json props;
    for (const auto& [name, fractions] : stats.proportions) props[name] = fractions;
    j["proportions_below_threshold"] = props;
    j["failure_count"] = stats.failure_count;
    json fails = json::array();
    for (const auto& [index, reason] : stats.failures)
        fails.push_back({{"instance", index}, {"reason", reason}});
    j["failures"] = fails;
    return j.dump(2) + "\n";
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

}  // namespace

std::string trace_to_json_text(const GameTrace& trace, bool verbose) {
    json j;
    j["converged"] = trace.converged;
    j["final_relative_change"] = trace.final_relative_change;
    json ledger = json::array();
    for (const auto& entry : trace.dimension_ledger)
        ledger.push_back({{"player", player_index(entry.player)},
                          {"k", entry.k},
                          {"state_dim", entry.state_dim}});
    j["dimension_ledger"] = ledger;
    json stages = json::array();
    for (const auto& stage : trace.stages) {
        json s;
        s["player"] = player_index(stage.plant.player);
        s["k"] = stage.plant.order_k;
        s["state_dim"] = stage.plant.state_dim;
        s["cost"] = stage.cost;
        s["regulator_radius"] = stage.regulator_radius;
        s["estimator_radius"] = stage.estimator_radius;
        s["closed_loop_radius"] = stage.closed_loop_radius;
        s["control_residual"] = stage.control_residual;
        s["filter_residual"] = stage.filter_residual;
        if (verbose) {
            s["K"] = matrix_to_json(stage.K);
            s["L"] = matrix_to_json(stage.L);
            s["P"] = matrix_to_json(stage.P);
            s["Sigma"] = matrix_to_json(stage.Sigma);
        }
        stages.push_back(std::move(s));
    }
    j["stages"] = stages;
    return j.dump(2) + "\n";
}

std::string analysis_to_csv(const StageAnalysis& analysis) {
    std::string csv = "index,eigenvalue_c,eigenvalue_o,hankel,delta,delta_ratio,gramian_ratio\n";
    const auto& g = analysis.gramians;
    for (std::size_t i = 0; i < g.eigenvalues_c.size(); ++i) {
        csv += std::to_string(i + 1) + "," + format_number(g.eigenvalues_c[i]) + "," +
               format_number(g.eigenvalues_o[i]) + "," + format_number(g.hankel[i]) + "," +
               format_number(analysis.decay.deltas[i]) + "," +
               format_number(analysis.decay.delta_ratios[i]) + "," +
               format_number(analysis.decay.gramian_ratios[i]) + "\n";
    }
    return csv;
}

std::string bounds_to_csv(const std::vector<ApproximationBound>& bounds) {
    std::string csv = "l,rank_limit,numerical_rank,epsilon,actual_error,bound,satisfied\n";
    for (const auto& b : bounds) {
        csv += std::to_string(b.l) + "," + std::to_string(b.rank_limit) + "," +
               std::to_string(b.numerical_rank) + "," + format_number(b.epsilon) + "," +
               format_number(b.actual_error) + "," + format_number(b.bound) + "," +
               (b.satisfied ? "true" : "false") + "\n";
    }
    return csv;
}

}  // namespace asymlq
