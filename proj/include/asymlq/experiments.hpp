#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "asymlq/belief_analysis.hpp"
#include "asymlq/game_model.hpp"

namespace asymlq {

inline constexpr const char* kVersion = "1.0.0";

// Formats a double with 17 significant digits (round-trip exact).
std::string format_number(double v);

// Runs the built-in example end to end and writes model.json, costs.csv,
// gramian_decay.csv, cholesky_compare.csv and manifest.json into output_dir.
// Output is byte-deterministic. Returns the written paths.
std::vector<std::string> run_example_outputs(const std::string& output_dir,
                                             const Tolerances& tol = Tolerances::defaults());

struct SuiteOptions {
    int count = 100;
    std::uint64_t seed = 0;
    GameDims dims{1, 1, 1, 1, 1};
    int iterations = 5;
    std::vector<double> thresholds{1e-5, 1e-10};
    int parallelism = 1;
    double spectral_target = 0.8;
    double r2_scale_start = 1.0;
};

struct SuiteStats {
    int instance_count = 0;
    int iterations_per_instance = 0;
    std::vector<double> thresholds;
    // quantity name -> fraction of pooled normalized values below each threshold
    std::map<std::string, std::vector<double>> proportions;
    int failure_count = 0;
    std::vector<std::pair<int, std::string>> failures;  // (instance index, reason)
};

// Pools normalized Gramian eigenvalues and Hankel singular values of each
// player's final-iteration plant over `count` generated instances. Failed
// instances are recorded and excluded from the proportions.
SuiteStats run_random_suite(const SuiteOptions& options,
                            const Tolerances& tol = Tolerances::defaults());

std::string suite_stats_to_json_text(const SuiteStats& stats, const SuiteOptions& options);

// Tabular per-stage analysis: index, eigenvalue_c, eigenvalue_o, hankel,
// delta, delta_ratio, gramian_ratio.
std::string analysis_to_csv(const StageAnalysis& analysis);
std::string bounds_to_csv(const std::vector<ApproximationBound>& bounds);

// Per-stage player, k, state_dim, cost, spectral radii and residuals;
// verbose adds the gain and Riccati matrices.
std::string trace_to_json_text(const GameTrace& trace, bool verbose);

}  // namespace asymlq
