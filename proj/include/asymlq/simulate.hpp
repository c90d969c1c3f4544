#pragma once

#include <cstdint>

#include "asymlq/best_response.hpp"

namespace asymlq {

struct McEstimate {
    double mean_cost = 0.0;
    double std_error = 0.0;
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
};

// Simulates the closed loop under both players' most recent strategies from
// the trace, each running its own filter on its own measurements, and returns
// the time-averaged stage cost after burn_in with a batch-means standard
// error. x0 is drawn from N(x0_mean, X0); belief states start at zero.
// Throws NotStable if the joint closed loop is unstable.
McEstimate monte_carlo_cost(const GameSpec& spec, const GameTrace& trace, std::int64_t steps,
                            std::uint64_t seed, std::int64_t burn_in,
                            const Tolerances& tol = Tolerances::defaults());

}  // namespace asymlq
