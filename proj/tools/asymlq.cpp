#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "asymlq/best_response.hpp"
#include "asymlq/experiments.hpp"
#include "asymlq/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;

using namespace asymlq;

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open \"" + path + "\" for writing");
    out << content;
    if (!out) throw ParseError("write failed for \"" + path + "\"");
}

GameDims parse_dims(const std::string& text) {
    GameDims dims;
    if (std::sscanf(text.c_str(), "%d,%d,%d,%d,%d", &dims.n, &dims.m1, &dims.m2, &dims.p1,
                    &dims.p2) != 5)
        throw ParseError("--dims expects n,m1,m2,p1,p2");
    return dims;
}

int cmd_validate(const std::string& model_path) {
    GameSpec spec;
    try {
        std::ifstream in(model_path);
        if (!in) throw ParseError("cannot open \"" + model_path + "\"");
        std::ostringstream buf;
        buf << in.rdbuf();
        spec = spec_from_json_text(buf.str());
    } catch (const ValidationError& e) {
        std::cout << "invalid model\n";
        for (const auto& v : e.report.violations)
            std::cout << "  " << v.check << ": " << v.message << "\n";
        return kExitValidation;
    }
    const ValidationReport report = validate(spec);
    if (!report.ok) {
        std::cout << "invalid model\n";
        for (const auto& v : report.violations)
            std::cout << "  " << v.check << ": " << v.message << "\n";
        return kExitValidation;
    }
    std::cout << "ok\n";
    return kExitOk;
}

int cmd_br_run(const std::string& model_path, int max_k, double tol, const std::string& out,
               bool maximizer_first, bool no_early_stop, bool verbose) {
    const GameSpec spec = load_spec(model_path);
    BestResponseOptions options;
    options.max_k = max_k;
    options.tol = tol;
    options.maximizer_first = maximizer_first;
    options.stop_on_convergence = !no_early_stop;
    const GameTrace trace = run_best_response(spec, options);
    if (!out.empty()) write_text(out, trace_to_json_text(trace, verbose));
    std::cout << "stages=" << trace.stages.size() << " converged="
              << (trace.converged ? "true" : "false")
              << " final_relative_change=" << format_number(trace.final_relative_change) << "\n";
    for (const auto& stage : trace.stages)
        std::cout << "  player=" << player_index(stage.plant.player) << " k="
                  << stage.plant.order_k << " state_dim=" << stage.plant.state_dim
                  << " cost=" << format_number(stage.cost) << "\n";
    return kExitOk;
}

int cmd_analyze(const std::string& model_path, int k, int player, const std::string& out_dir) {
    const GameSpec spec = load_spec(model_path);
    BestResponseOptions options;
    options.max_k = k;
    options.stop_on_convergence = false;
    const GameTrace trace = run_best_response(spec, options);

    const Player who = player == 1 ? Player::Minimizer : Player::Maximizer;
    const StageSolution* stage = nullptr;
    for (const auto& s : trace.stages)
        if (s.plant.player == who && s.plant.order_k == k) stage = &s;
    if (!stage)
        throw SolverError(SolverErrorKind::NoConvergence,
                          "requested stage not reached (player " + std::to_string(player) +
                              ", k " + std::to_string(k) + ")");

    const StageAnalysis analysis = analyze_stage(*stage);
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string tag = "_p" + std::to_string(player) + "_k" + std::to_string(k);
    const std::string decay_path = (fs::path(out_dir) / ("decay" + tag + ".csv")).string();
    const std::string bounds_path = (fs::path(out_dir) / ("bounds" + tag + ".csv")).string();
    write_text(decay_path, analysis_to_csv(analysis));
    std::cout << "wrote " << decay_path << "\n";
    if (analysis.bounds.empty()) {
        std::cout << "bounds skipped: " << analysis.bounds_skipped_reason << "\n";
    } else {
        write_text(bounds_path, bounds_to_csv(analysis.bounds));
        std::cout << "wrote " << bounds_path << "\n";
    }
    return kExitOk;
}

int cmd_example(const std::string& out_dir) {
    for (const auto& path : run_example_outputs(out_dir)) std::cout << "wrote " << path << "\n";
    return kExitOk;
}

int cmd_suite(const SuiteOptions& options, const std::string& out) {
    const SuiteStats stats = run_random_suite(options);
    const std::string text = suite_stats_to_json_text(stats, options);
    if (!out.empty()) {
        write_text(out, text);
        std::cout << "wrote " << out << "\n";
    } else {
        std::cout << text;
    }
    return kExitOk;
}

int cmd_simulate(const std::string& model_path, std::int64_t steps, std::uint64_t seed,
                 std::int64_t burn_in) {
    const GameSpec spec = load_spec(model_path);
    const GameTrace trace = run_best_response(spec, {});
    const McEstimate est = monte_carlo_cost(spec, trace, steps, seed, burn_in);
    const double analytic = trace.stages.back().cost;
    std::cout << "mean_cost=" << format_number(est.mean_cost)
              << " std_error=" << format_number(est.std_error) << " steps=" << est.steps
              << " seed=" << est.seed << "\n";
    std::cout << "analytic_cost=" << format_number(analytic)
              << " deviation_in_std_errors="
              << format_number(est.std_error > 0.0
                                   ? std::abs(est.mean_cost - analytic) / est.std_error
                                   : 0.0)
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Best-response dynamics and belief-decay analysis for zero-sum LQG games"};
    app.require_subcommand(1);

    std::string model_path, out, out_dir = ".";
    int max_k = 10, k = 5, player = 1;
    double tol = 1e-6;
    bool maximizer_first = false, no_early_stop = false, verbose = false;

    auto* validate_cmd = app.add_subcommand("validate", "Check a model file");
    validate_cmd->add_option("model", model_path, "model JSON file")->required();

    auto* br = app.add_subcommand("br", "Best-response dynamics");
    br->require_subcommand(1);
    auto* br_run = br->add_subcommand("run", "Run the alternating best-response iteration");
    br_run->add_option("model", model_path, "model JSON file")->required();
    br_run->add_option("--max-k", max_k, "iteration limit");
    br_run->add_option("--tol", tol, "relative cost-change tolerance");
    br_run->add_option("--out", out, "write the trace as JSON");
    br_run->add_flag("--maximizer-first", maximizer_first, "let the maximizer move first");
    br_run->add_flag("--no-early-stop", no_early_stop, "run all iterations");
    br_run->add_flag("--verbose", verbose, "include gain/Riccati matrices in the trace");

    auto* analyze_cmd = app.add_subcommand("analyze", "Gramian/decay analysis of one stage");
    analyze_cmd->add_option("model", model_path, "model JSON file")->required();
    analyze_cmd->add_option("--k", k, "best-response iteration");
    analyze_cmd->add_option("--player", player, "1 (minimizer) or 2 (maximizer)")
        ->check(CLI::IsMember({1, 2}));
    analyze_cmd->add_option("--out", out_dir, "output directory");

    std::string example_dir = "example_output";
    auto* example_cmd = app.add_subcommand("example", "Run the built-in example");
    example_cmd->add_option("--out", example_dir, "output directory");

    SuiteOptions suite_options;
    std::string dims_text = "1,1,1,1,1", suite_out;
    auto* suite_cmd = app.add_subcommand("suite", "Random-instance decay statistics");
    suite_cmd->add_option("--count", suite_options.count, "number of instances");
    suite_cmd->add_option("--seed", suite_options.seed, "base seed");
    suite_cmd->add_option("--dims", dims_text, "n,m1,m2,p1,p2");
    suite_cmd->add_option("--iters", suite_options.iterations, "best-response iterations");
    suite_cmd->add_option("--thresholds", suite_options.thresholds,
                          "descending thresholds (default 1e-5 1e-10)");
    suite_cmd->add_option("--parallelism", suite_options.parallelism, "worker threads");
    suite_cmd->add_option("--out", suite_out, "write stats JSON here instead of stdout");

    std::int64_t steps = 1000000, burn_in = 1000;
    std::uint64_t sim_seed = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo check of the analytic cost");
    sim_cmd->add_option("model", model_path, "model JSON file")->required();
    sim_cmd->add_option("--steps", steps, "trajectory length");
    sim_cmd->add_option("--seed", sim_seed, "noise seed");
    sim_cmd->add_option("--burn-in", burn_in, "discarded initial steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitIo;
    }

    try {
        if (app.got_subcommand(validate_cmd)) return cmd_validate(model_path);
        if (app.got_subcommand(br))
            return cmd_br_run(model_path, max_k, tol, out, maximizer_first, no_early_stop,
                              verbose);
        if (app.got_subcommand(analyze_cmd)) return cmd_analyze(model_path, k, player, out_dir);
        if (app.got_subcommand(example_cmd)) return cmd_example(example_dir);
        if (app.got_subcommand(suite_cmd)) {
            suite_options.dims = parse_dims(dims_text);
            return cmd_suite(suite_options, suite_out);
        }
        if (app.got_subcommand(sim_cmd)) return cmd_simulate(model_path, steps, sim_seed, burn_in);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitIo;
    } catch (const GameIterationError& e) {
        std::cerr << "solver error: " << e.what() << " (after "
                  << e.partial_trace.stages.size() << " stages)\n";
        return kExitSolver;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitIo;
}
