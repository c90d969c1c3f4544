#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asymlq/types.hpp"

namespace asymlq {

struct GameDims {
    int n = 0;   // state
    int m1 = 0;  // minimizer input
    int m2 = 0;  // maximizer input
    int p1 = 0;  // minimizer output
    int p2 = 0;  // maximizer output

    bool operator==(const GameDims&) const = default;
};

// Two-player zero-sum LQG game instance. Player 1 minimizes, player 2
// maximizes; R1 must be positive definite and R2 negative definite.
struct GameSpec {
    GameDims dims;
    Matrix A, B1, B2, C1, C2;
    Matrix W, V1, V2;
    Matrix Q, R1, R2;
    Vector x0_mean;  // defaults to zero
    Matrix X0;       // defaults to identity
};

// Built-in 2-state example system used by the `example` command and tests.
GameSpec example_game();

struct ValidationIssue {
    std::string check;
    std::string message;
};

struct ValidationReport {
    bool ok = false;
    std::vector<ValidationIssue> violations;
};

ValidationReport validate(const GameSpec& spec,
                          const Tolerances& tol = Tolerances::defaults());

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& what, ValidationReport report)
        : std::runtime_error(what), report(std::move(report)) {}
    ValidationReport report;
};

// JSON model files; see docs/model-format.md. load_spec validates after
// parsing and throws ValidationError with the full report on failure.
GameSpec load_spec(const std::string& path);
void save_spec(const GameSpec& spec, const std::string& path);
GameSpec spec_from_json_text(const std::string& text);
std::string spec_to_json_text(const GameSpec& spec);

// Deterministic random instance. Free entries are standard normal draws from
// a seeded generator (see rng.hpp for the exact stream); A is rescaled so
// rho(A) = spectral_target; W, V1, V2, Q, R1 are formed as GG' + 1e-6 I from
// normal G; R2 = -cI with c found by doubling from r2_scale_start until the
// first maximizer best response is bounded. Throws R2SearchFailed after 30
// doublings.
GameSpec random_instance(std::uint64_t seed, const GameDims& dims, double spectral_target,
                         double r2_scale_start = 1.0,
                         const Tolerances& tol = Tolerances::defaults());

}  // namespace asymlq
