#pragma once

#include <utility>
#include <vector>

#include "asymlq/game_model.hpp"
#include "asymlq/numerics.hpp"

namespace asymlq {

enum class Player { Minimizer = 1, Maximizer = 2 };

inline int player_index(Player p) { return p == Player::Minimizer ? 1 : 2; }
inline Player opponent(Player p) {
    return p == Player::Minimizer ? Player::Maximizer : Player::Minimizer;
}

// One player's augmented belief plant at best-response order k. The state
// stacks the true system state on top of the opponent's most recent belief
// state:

//   X+ = A_bar X + B_bar u + F w_stacked,   y = C_bar X + v_own,
//
// with process noise covariance W_bar (for the stacked noise entering through
// F) and stage weight X' Q_bar X + u' R u.
struct AugmentedPlant {
    Player player = Player::Minimizer;
    int order_k = 1;
    Matrix A_bar, B_bar, C_bar, F, W_bar, Q_bar;
    Matrix R;  // this player's input weight
    int state_dim = 0;
};

// One best response: gains, Riccati solutions, the doubled closed loop
// (plant state stacked on this player's belief state), and its optimal
// average cost.
struct StageSolution {
    AugmentedPlant plant;
    Matrix K;      // feedback gain, u = K z
    Matrix L;      // estimator gain
    Matrix P;      // control Riccati solution
    Matrix Sigma;  // filter Riccati solution
    Matrix closed_loop_A, closed_loop_F, W_tilde, Q_tilde;
    double cost = 0.0;
    double regulator_radius = 0.0;   // rho(A_bar + B_bar K)
    double estimator_radius = 0.0;   // rho(A_bar - L C_bar)
    double closed_loop_radius = 0.0; // rho(closed_loop_A)
    double control_residual = 0.0;
    double filter_residual = 0.0;
};

struct DimensionLedgerEntry {
    Player player;
    int k = 0;
    int state_dim = 0;
};

struct GameTrace {
    std::vector<StageSolution> stages;  // alternating, first mover leads
    bool converged = false;
    double final_relative_change = 0.0;
    std::vector<DimensionLedgerEntry> dimension_ledger;

    const StageSolution* last_stage_of(Player p) const {
        for (auto it = stages.rbegin(); it != stages.rend(); ++it)
            if (it->plant.player == p) return &*it;
        return nullptr;
    }
};

// Thrown when a stage fails mid-iteration; carries the stages completed so far.
class GameIterationError : public SolverError {
public:
    GameIterationError(SolverErrorKind kind, const std::string& what, GameTrace partial)
        : SolverError(kind, what), partial_trace(std::move(partial)) {}
    GameTrace partial_trace;
};

// Order-1 plant for the first-moving player: the raw system with that
// player's input/output channels and weights.
AugmentedPlant initial_plant(const GameSpec& spec, Player player);

// Maximizer's order-k plant built from the minimizer's stage at the same k.
AugmentedPlant augment_for_max(const GameSpec& spec, const StageSolution& prev_min);

// Minimizer's order-k plant built from the maximizer's stage at k-1 (k >= 2).
AugmentedPlant augment_for_min(const GameSpec& spec, const StageSolution& prev_max);

// Solves the stage LQG problem for the plant's player: control DARE with the
// minimizer/maximizer sign convention, filter DARE with W_eff = F W_bar F',
// then the doubled closed loop and its cost Tr(P~ W~) via a Lyapunov solve.
StageSolution lqg_best_response(const AugmentedPlant& plant, const Matrix& v_own,
                                const Tolerances& tol = Tolerances::defaults());

// Minimizer's order-1 LQG stage (the iteration-1 best response).
StageSolution minimizer_initial(const GameSpec& spec,
                                const Tolerances& tol = Tolerances::defaults());

// Both cost routes, computed independently: (Tr(P~ W~), Tr(Sigma~ Q~)).
std::pair<double, double> evaluate_cost(const StageSolution& stage,
                                        const Tolerances& tol = Tolerances::defaults());

struct BestResponseOptions {
    int max_k = 10;
    double tol = 1e-6;             // relative cost-change convergence threshold
    bool maximizer_first = false;  // alternative iteration order
    bool stop_on_convergence = true;
    Tolerances numerics = Tolerances::defaults();
};

// Alternating best responses: min(k=1), max(k=1), min(k=2), ... up to max_k,
// declared converged when both players' latest cost pairs change by at most
// tol relative. A ValueUnbounded stage aborts with the partial trace attached.
GameTrace run_best_response(const GameSpec& spec,
                            const BestResponseOptions& options = {});

// Extends a converged trace by one further best response per player and
// returns each player's relative cost change (minimizer, maximizer).
std::pair<double, double> deviation_check(const GameSpec& spec, const GameTrace& trace,
                                          const Tolerances& tol = Tolerances::defaults());

}  // namespace asymlq
