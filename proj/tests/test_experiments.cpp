#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "asymlq/experiments.hpp"
#include "asymlq/simulate.hpp"

using namespace asymlq;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("monte carlo cost") {
    SUBCASE("near-noiseless simulation is near zero") {
        GameSpec spec = example_game();
        spec.W = 1e-12 * Matrix::Identity(2, 2);
        spec.V1 = Matrix::Constant(1, 1, 1e-12);
        spec.V2 = Matrix::Constant(1, 1, 1e-12);
        const GameTrace trace = run_best_response(spec, {.max_k = 4});
        const McEstimate est = monte_carlo_cost(spec, trace, 20000, 7, 1000);
        CHECK(std::abs(est.mean_cost) <= 1e-9);
    }
    SUBCASE("deterministic for a fixed seed") {
        const GameSpec spec = random_instance(7, {1, 1, 1, 1, 1}, 0.8);
        const GameTrace trace = run_best_response(spec, {.max_k = 6});
        const McEstimate a = monte_carlo_cost(spec, trace, 50000, 123, 1000);
        const McEstimate b = monte_carlo_cost(spec, trace, 50000, 123, 1000);
        CHECK(a.mean_cost == b.mean_cost);
        CHECK(a.std_error == b.std_error);
        const McEstimate c = monte_carlo_cost(spec, trace, 50000, 124, 1000);
        CHECK(a.mean_cost != c.mean_cost);
    }
    SUBCASE("agrees with the analytic cost on a scalar instance") {
        const GameSpec spec = random_instance(3, {1, 1, 1, 1, 1}, 0.8);
        const GameTrace trace = run_best_response(spec, {.max_k = 10, .tol = 1e-6});
        REQUIRE(trace.converged);
        const McEstimate est = monte_carlo_cost(spec, trace, 1000000, 31, 1000);
        const double analytic = trace.stages.back().cost;
        CHECK(std::abs(est.mean_cost - analytic) <= 3.0 * est.std_error);
    }
    SUBCASE("validates the order-1 minimizer cost with the maximizer inert") {
        GameSpec spec = example_game();
        spec.B2 = Matrix::Zero(2, 1);
        const GameTrace trace = run_best_response(spec, {.max_k = 1});
        REQUIRE(trace.stages.size() == 2);
        CHECK(max_abs(trace.stages[1].K) == 0.0);  // nothing for the maximizer to do
        const McEstimate est = monte_carlo_cost(spec, trace, 1000000, 11, 1000);
        const double analytic = trace.stages.front().cost;
        CHECK(std::abs(est.mean_cost - analytic) <= 3.0 * est.std_error);
    }
    SUBCASE("argument checks") {
        const GameSpec spec = example_game();
        const GameTrace trace = run_best_response(spec, {.max_k = 2});
        CHECK_THROWS_AS(monte_carlo_cost(spec, trace, 100, 1, 100), std::invalid_argument);
    }
}

TEST_CASE("example outputs") {
    namespace fs = std::filesystem;
    const std::string dir1 = (fs::temp_directory_path() / "asymlq_example_1").string();
    const std::string dir2 = (fs::temp_directory_path() / "asymlq_example_2").string();
    fs::remove_all(dir1);
    fs::remove_all(dir2);

    const auto written = run_example_outputs(dir1);
    CHECK(written.size() == 5);

    SUBCASE("costs converge within ten iterations") {
        const std::string costs = slurp(dir1 + "/costs.csv");
        CHECK(costs.rfind("iteration,player,cost\n", 0) == 0);
        // Manifest records convergence under 1e-6.
        const std::string manifest = slurp(dir1 + "/manifest.json");
        CHECK(manifest.find("\"converged\": true") != std::string::npos);
    }
    SUBCASE("gramian decay csv spans ten decades at iteration 5") {
        const std::string decay = slurp(dir1 + "/gramian_decay.csv");
        double min_ratio = 1.0;
        std::istringstream lines(decay);
        std::string line;
        std::getline(lines, line);  // header
        while (std::getline(lines, line)) {
            const auto c1 = line.find(','), c2 = line.rfind(',');
            if (line.substr(0, c1) != "5") continue;
            min_ratio = std::min(min_ratio, std::stod(line.substr(c2 + 1)));
        }
        CHECK(min_ratio <= 1e-10);
    }
    SUBCASE("runs are byte-identical") {
        run_example_outputs(dir2);
        for (const char* name :
             {"model.json", "costs.csv", "gramian_decay.csv", "cholesky_compare.csv",
              "manifest.json"}) {
            CHECK(slurp(dir1 + "/" + name) == slurp(dir2 + "/" + name));
        }
    }
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("random suite") {
    SuiteOptions options;
    options.count = 10;
    options.seed = 99;
    options.iterations = 4;

    SUBCASE("structure and threshold monotonicity") {
        const SuiteStats stats = run_random_suite(options);
        CHECK(stats.proportions.size() == 6);
        for (const auto& [name, fractions] : stats.proportions) {
            REQUIRE(fractions.size() == 2);
            CHECK(fractions[0] >= 0.0);
            CHECK(fractions[0] <= 1.0);
            CHECK(fractions[1] <= fractions[0]);  // monotone in threshold
        }
        CHECK(stats.failure_count <= options.count);
    }
    SUBCASE("deterministic, including under parallelism") {
        const SuiteStats a = run_random_suite(options);
        SuiteOptions parallel = options;
        parallel.parallelism = 4;
        const SuiteStats b = run_random_suite(parallel);
        CHECK(suite_stats_to_json_text(a, options) == suite_stats_to_json_text(b, options));
    }
    SUBCASE("descending thresholds enforced") {
        SuiteOptions bad = options;
        bad.thresholds = {1e-10, 1e-5};
        CHECK_THROWS_AS(run_random_suite(bad), std::invalid_argument);
    }
}

TEST_CASE("trace serialization") {
    const GameTrace trace = run_best_response(example_game(), {.max_k = 2});
    const std::string text = trace_to_json_text(trace, false);
    CHECK(text.find("\"stages\"") != std::string::npos);
    CHECK(text.find("\"K\"") == std::string::npos);
    const std::string verbose = trace_to_json_text(trace, true);
    CHECK(verbose.find("\"K\"") != std::string::npos);
    CHECK(verbose.find("\"Sigma\"") != std::string::npos);
}
