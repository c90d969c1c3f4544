#include "asymlq/best_response.hpp"

namespace asymlq {

namespace {

const Matrix& own_B(const GameSpec& s, Player p) { return p == Player::Minimizer ? s.B1 : s.B2; }
const Matrix& own_C(const GameSpec& s, Player p) { return p == Player::Minimizer ? s.C1 : s.C2; }
const Matrix& own_V(const GameSpec& s, Player p) { return p == Player::Minimizer ? s.V1 : s.V2; }
const Matrix& own_R(const GameSpec& s, Player p) { return p == Player::Minimizer ? s.R1 : s.R2; }

int expected_state_dim(Player p, int k, int n, bool maximizer_first) {
    const bool first_mover = (p == Player::Minimizer) != maximizer_first;
    return first_mover ? (2 * k - 1) * n : 2 * k * n;
}

// Next plant for the player opposing prev: the state stacks x on top of the
// previous player's belief state, whose closed-loop filter dynamics are
// embedded in the lower-right block.
AugmentedPlant augment_against(const GameSpec& spec, const StageSolution& prev, int new_k) {
    const Player prev_player = prev.plant.player;
    const Player player = opponent(prev_player);
    const int n = spec.dims.n;
    const int sd_prev = prev.plant.state_dim;
    const int sd = n + sd_prev;

    const Matrix& b_op = own_B(spec, prev_player);
    const Matrix& c_op = own_C(spec, prev_player);
    const Matrix& v_op = own_V(spec, prev_player);
    const Matrix& r_op = own_R(spec, prev_player);
    const int p_op = static_cast<int>(c_op.rows());

    AugmentedPlant plant;
    plant.player = player;
    plant.order_k = new_k;
    plant.state_dim = sd;

    plant.A_bar = Matrix::Zero(sd, sd);
    plant.A_bar.topLeftCorner(n, n) = spec.A;
    plant.A_bar.topRightCorner(n, sd_prev) = b_op * prev.K;
    plant.A_bar.bottomLeftCorner(sd_prev, n) = prev.L * c_op;
    plant.A_bar.bottomRightCorner(sd_prev, sd_prev) =
        prev.plant.A_bar + prev.plant.B_bar * prev.K - prev.L * prev.plant.C_bar;

    const Matrix& b_own = own_B(spec, player);
    const Matrix& c_own = own_C(spec, player);
    plant.B_bar = Matrix::Zero(sd, b_own.cols());
    plant.B_bar.topRows(n) = b_own;
    plant.C_bar = Matrix::Zero(c_own.rows(), sd);
    plant.C_bar.leftCols(n) = c_own;

    plant.F = Matrix::Zero(sd, n + p_op);
    plant.F.topLeftCorner(n, n) = Matrix::Identity(n, n);
    plant.F.bottomRightCorner(sd_prev, p_op) = prev.L;

    plant.W_bar = Matrix::Zero(n + p_op, n + p_op);
    plant.W_bar.topLeftCorner(n, n) = spec.W;
    plant.W_bar.bottomRightCorner(p_op, p_op) = v_op;

    plant.Q_bar = Matrix::Zero(sd, sd);
    plant.Q_bar.topLeftCorner(n, n) = spec.Q;
    plant.Q_bar.bottomRightCorner(sd_prev, sd_prev) = prev.K.transpose() * r_op * prev.K;

    plant.R = own_R(spec, player);
    return plant;
}

}  // namespace

AugmentedPlant initial_plant(const GameSpec& spec, Player player) {
    const int n = spec.dims.n;
    AugmentedPlant plant;
    plant.player = player;
    plant.order_k = 1;
    plant.state_dim = n;
    plant.A_bar = spec.A;
    plant.B_bar = own_B(spec, player);
    plant.C_bar = own_C(spec, player);
    plant.F = Matrix::Identity(n, n);
    plant.W_bar = spec.W;
    plant.Q_bar = spec.Q;
    plant.R = own_R(spec, player);
    return plant;
}

AugmentedPlant augment_for_max(const GameSpec& spec, const StageSolution& prev_min) {
    if (prev_min.plant.player != Player::Minimizer)
        throw std::invalid_argument("augment_for_max: expected a minimizer stage");
    return augment_against(spec, prev_min, prev_min.plant.order_k);
}

AugmentedPlant augment_for_min(const GameSpec& spec, const StageSolution& prev_max) {
    if (prev_max.plant.player != Player::Maximizer)
        throw std::invalid_argument("augment_for_min: expected a maximizer stage");
    return augment_against(spec, prev_max, prev_max.plant.order_k + 1);
}

StageSolution lqg_best_response(const AugmentedPlant& plant, const Matrix& v_own,
                                const Tolerances& tol) {
    const int sd = plant.state_dim;
    const RiccatiRole role =
        plant.player == Player::Minimizer ? RiccatiRole::Minimizer : RiccatiRole::Maximizer;

    StageSolution stage;
    stage.plant = plant;

    const RiccatiSolution ctrl =
        solve_dare_control(plant.A_bar, plant.B_bar, plant.Q_bar, plant.R, role, tol);
    stage.P = ctrl.P;
    stage.K = ctrl.gain;
    stage.regulator_radius = ctrl.closed_loop_spectral_radius;
    stage.control_residual = ctrl.residual;

    const Matrix w_eff = symmetrize(plant.F * plant.W_bar * plant.F.transpose());
    const RiccatiSolution filt = solve_dare_filter(plant.A_bar, plant.C_bar, w_eff, v_own, tol);
    stage.Sigma = filt.P;
    stage.L = filt.gain;
    stage.estimator_radius = filt.closed_loop_spectral_radius;
    stage.filter_residual = filt.residual;

    // Doubled loop: plant state stacked on this player's belief state.
    stage.closed_loop_A = Matrix::Zero(2 * sd, 2 * sd);
    stage.closed_loop_A.topLeftCorner(sd, sd) = plant.A_bar;
    stage.closed_loop_A.topRightCorner(sd, sd) = plant.B_bar * stage.K;
    stage.closed_loop_A.bottomLeftCorner(sd, sd) = stage.L * plant.C_bar;
    stage.closed_loop_A.bottomRightCorner(sd, sd) =
        plant.A_bar + plant.B_bar * stage.K - stage.L * plant.C_bar;
    stage.closed_loop_radius = spectral_radius(stage.closed_loop_A);

    const int wd = static_cast<int>(plant.F.cols());
    const int po = static_cast<int>(v_own.rows());
    stage.closed_loop_F = Matrix::Zero(2 * sd, wd + po);
    stage.closed_loop_F.topLeftCorner(sd, wd) = plant.F;
    stage.closed_loop_F.bottomRightCorner(sd, po) = stage.L;

    Matrix noise_cov = Matrix::Zero(wd + po, wd + po);
    noise_cov.topLeftCorner(wd, wd) = plant.W_bar;
    noise_cov.bottomRightCorner(po, po) = v_own;
    stage.W_tilde = symmetrize(stage.closed_loop_F * noise_cov * stage.closed_loop_F.transpose());

    stage.Q_tilde = Matrix::Zero(2 * sd, 2 * sd);
    stage.Q_tilde.topLeftCorner(sd, sd) = plant.Q_bar;
    stage.Q_tilde.bottomRightCorner(sd, sd) = stage.K.transpose() * plant.R * stage.K;

    const Matrix p_tilde = solve_dlyap(stage.closed_loop_A, stage.Q_tilde, tol);
    stage.cost = (p_tilde * stage.W_tilde).trace();
    return stage;
}

StageSolution minimizer_initial(const GameSpec& spec, const Tolerances& tol) {
    return lqg_best_response(initial_plant(spec, Player::Minimizer), spec.V1, tol);
}

std::pair<double, double> evaluate_cost(const StageSolution& stage, const Tolerances& tol) {
    const Matrix p_tilde = solve_dlyap(stage.closed_loop_A, stage.Q_tilde, tol);
    const Matrix s_tilde = solve_dlyap(stage.closed_loop_A.transpose(), stage.W_tilde, tol);
    return {(p_tilde * stage.W_tilde).trace(), (s_tilde * stage.Q_tilde).trace()};
}

GameTrace run_best_response(const GameSpec& spec, const BestResponseOptions& options) {
    if (options.max_k < 1) throw std::invalid_argument("run_best_response: max_k must be >= 1");
    if (!(options.tol > 0)) throw std::invalid_argument("run_best_response: tol must be > 0");

    const Player first = options.maximizer_first ? Player::Maximizer : Player::Minimizer;
    const Player second = opponent(first);

    GameTrace trace;
    double last_cost[3] = {0, 0, 0};  // indexed by player_index
    double last_change[3] = {1, 1, 1};
    int have_costs[3] = {0, 0, 0};

    auto record = [&](const StageSolution& stage) {
        const int pi = player_index(stage.plant.player);
        if (have_costs[pi] > 0) {
            last_change[pi] = std::abs(stage.cost - last_cost[pi]) /
                              std::max(1.0, std::abs(stage.cost));
        }
        last_cost[pi] = stage.cost;
        ++have_costs[pi];
        trace.dimension_ledger.push_back(
            {stage.plant.player, stage.plant.order_k, stage.plant.state_dim});
        trace.stages.push_back(stage);
    };

    auto run_stage = [&](const AugmentedPlant& plant) -> const StageSolution& {
        const int expect =
            expected_state_dim(plant.player, plant.order_k, spec.dims.n, options.maximizer_first);
        if (plant.state_dim != expect)
            throw GameIterationError(SolverErrorKind::NoConvergence,
                                     "internal dimension ledger mismatch", trace);
        try {
            record(lqg_best_response(plant, own_V(spec, plant.player), options.numerics));
        } catch (const SolverError& e) {
            throw GameIterationError(e.kind(), e.what(), trace);
        }
        return trace.stages.back();
    };

    auto converged_now = [&] {
        return have_costs[1] >= 2 && have_costs[2] >= 2 &&
               last_change[player_index(first)] <= options.tol &&
               last_change[player_index(second)] <= options.tol;
    };

    const StageSolution* prev = &run_stage(initial_plant(spec, first));
    for (int k = 1; k <= options.max_k; ++k) {
        prev = &run_stage(augment_against(spec, *prev, k));
        if (options.stop_on_convergence && converged_now()) break;
        if (k == options.max_k) break;
        prev = &run_stage(augment_against(spec, *prev, k + 1));
        if (options.stop_on_convergence && converged_now()) break;
    }
    trace.converged = converged_now();
    trace.final_relative_change =
        std::max(last_change[player_index(first)], last_change[player_index(second)]);
    return trace;
}

std::pair<double, double> deviation_check(const GameSpec& spec, const GameTrace& trace,
                                          const Tolerances& tol) {
    const StageSolution* last = trace.stages.empty() ? nullptr : &trace.stages.back();
    if (!last) throw std::invalid_argument("deviation_check: empty trace");

    // One further response per player, continuing the alternation.
    const StageSolution* prev_min = trace.last_stage_of(Player::Minimizer);
    const StageSolution* prev_max = trace.last_stage_of(Player::Maximizer);
    if (!prev_min || !prev_max)
        throw std::invalid_argument("deviation_check: need at least one stage per player");

    double change_min = 0.0, change_max = 0.0;
    if (last->plant.player == Player::Maximizer) {
        const StageSolution next_min = lqg_best_response(
            augment_against(spec, *last, last->plant.order_k + 1), own_V(spec, Player::Minimizer),
            tol);
        change_min = std::abs(next_min.cost - prev_min->cost) /
                     std::max(1.0, std::abs(next_min.cost));
        const StageSolution next_max = lqg_best_response(
            augment_against(spec, next_min, next_min.plant.order_k),
            own_V(spec, Player::Maximizer), tol);
        change_max = std::abs(next_max.cost - prev_max->cost) /
                     std::max(1.0, std::abs(next_max.cost));
    } else {
        const StageSolution next_max = lqg_best_response(
            augment_against(spec, *last, last->plant.order_k), own_V(spec, Player::Maximizer),
            tol);
        change_max = std::abs(next_max.cost - prev_max->cost) /
                     std::max(1.0, std::abs(next_max.cost));
        const StageSolution next_min = lqg_best_response(
            augment_against(spec, next_max, next_max.plant.order_k + 1),
            own_V(spec, Player::Minimizer), tol);
        change_min = std::abs(next_min.cost - prev_min->cost) /
                     std::max(1.0, std::abs(next_min.cost));
    }
    return {change_min, change_max};
}

}  // namespace asymlq
