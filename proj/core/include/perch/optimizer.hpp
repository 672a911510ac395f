#pragma once

#include "perch/lbfgs.hpp"
#include "perch/penalties.hpp"
#include "perch/scenario.hpp"
#include "perch/spline.hpp"
#include "perch/terminal.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace perch
{
    /// Packed optimization variables. Layout: [T', q (column-major, 3(N-1)), v_t (2), tau_f].
    struct DecisionVector
    {
        double T_prime = 0.0; // log of the total duration
        Eigen::Matrix3Xd q;
        Vec2 v_t = Vec2::Zero();
        double tau_f = 0.0;

        double duration() const;
        TerminalVars terminal() const { return {v_t, tau_f}; }

        Eigen::VectorXd pack() const;
        /// Throws std::invalid_argument when the length does not match pieces.
        static DecisionVector unpack(const Eigen::VectorXd &x, int pieces);
        static Eigen::Index packed_size(int pieces) { return 3 * (pieces - 1) + 4; }
    };

    struct CostBreakdown
    {
        double energy = 0.0; // integral of |p^(4)|^2
        double time = 0.0;   // rho * T
        PenaltyIntegrals penalties;
        double regularizer = 0.0; // |v_t|^2
        double total = 0.0;
    };

    struct CostEvaluation
    {
        double cost = 0.0;
        Eigen::VectorXd grad;
        CostBreakdown parts;
        int degenerate_samples = 0;
    };

    /// Total cost J = J_o + sum w J and its exact gradient over the packed vector. The gradient
    /// covers every entry, including the terminal ones a fixed-terminal solve masks out.
    CostEvaluation cost_and_grad(const Eigen::VectorXd &x, const Scenario &scenario);

    /// Spline implied by a decision vector.
    PerchSpline build_trajectory(const DecisionVector &x, const Scenario &scenario);

    /// Cold start: v_t = 0, initial duration and phase per the solver config, waypoints sampled
    /// from the single-piece minimum-snap boundary value problem.
    DecisionVector initial_guess(const Scenario &scenario);

    enum class SolveStatus
    {
        Converged,
        MaxIterations,
        LineSearchFailure,
    };

    const char *to_string(SolveStatus s);

    struct PlanResult
    {
        PerchSpline spline;
        TerminalVars terminal;
        double duration = 0.0;
        double cost = 0.0;
        CostBreakdown parts;
        int iterations = 0;
        int evaluations = 0;
        double wall_time_ms = 0.0;
        SolveStatus status = SolveStatus::MaxIterations;
        lbfgs::Status solver_status = lbfgs::Status::MaxIterations;
        DecisionVector decision;
    };

    /// Minimizes the total cost from the cold-start guess or from start.
    PlanResult solve(const Scenario &scenario, const std::optional<DecisionVector> &start = std::nullopt);

    /// Scenario seen elapsed seconds into executing plan: the initial state is re-anchored on
    /// the trajectory and the platform model is moved forward.
    Scenario advance(const Scenario &scenario, const PlanResult &plan, double elapsed);

    /// Warm start for a solve that begins elapsed seconds into previous.
    DecisionVector shifted_start(const PlanResult &previous, double elapsed, int pieces);

    /// Warm-started solve of an updated scenario.
    PlanResult replan(const Scenario &updated, const PlanResult &previous, double elapsed);

} // namespace perch
