#include "perch/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace perch
{
    double DecisionVector::duration() const
    {
        return std::exp(T_prime);
    }

    Eigen::VectorXd DecisionVector::pack() const
    {
        const int pieces = static_cast<int>(q.cols()) + 1;
        Eigen::VectorXd x(packed_size(pieces));
        x(0) = T_prime;
        x.segment(1, q.size()) = q.reshaped();
        x.segment(1 + q.size(), 2) = v_t;
        x(x.size() - 1) = tau_f;
        return x;
    }

    DecisionVector DecisionVector::unpack(const Eigen::VectorXd &x, int pieces)
    {
        if (pieces < 2 || x.size() != packed_size(pieces))
        {
            throw std::invalid_argument("decision vector length does not match the piece count");
        }
        DecisionVector d;
        d.T_prime = x(0);
        d.q = x.segment(1, 3 * (pieces - 1)).reshaped(3, pieces - 1);
        d.v_t = x.segment(1 + 3 * (pieces - 1), 2);
        d.tau_f = x(x.size() - 1);
        return d;
    }

    PerchSpline build_trajectory(const DecisionVector &x, const Scenario &scenario)
    {
        const double duration = x.duration();
        const TerminalState tail = terminal_state(x.terminal(), scenario.platform, scenario.geometry,
                                                  scenario.limits, duration);
        return PerchSpline::build(scenario.initial, tail.state, x.q, duration);
    }

    CostEvaluation cost_and_grad(const Eigen::VectorXd &x, const Scenario &scenario)
    {
        const int pieces = scenario.solver.pieces;
        const DecisionVector dv = DecisionVector::unpack(x, pieces);
        const double duration = dv.duration();

        const TerminalState tail = terminal_state(dv.terminal(), scenario.platform, scenario.geometry,
                                                  scenario.limits, duration);
        const PerchSpline spline = PerchSpline::build(scenario.initial, tail.state, dv.q, duration);

        const PerchSpline::Energy energy = spline.energy();
        const PenaltyContext ctx{scenario.platform, scenario.geometry, scenario.limits,
                                 scenario.weights, scenario.smoothing, scenario.quadrature};
        const Accumulated pen = accumulate(spline, ctx);
        const Regularizer reg = tangential_regularizer(dv.v_t);
        const PenaltyWeights &w = scenario.weights;

        const PerchSpline::Gradients g = spline.propagate(energy.d_coeffs + pen.d_coeffs, energy.d_times + pen.d_times);

        const double d_duration = g.d_total_duration + w.rho_time + pen.d_total_explicit +
                                  g.d_tail.col(0).dot(tail.d_pos_d_T) + g.d_tail.col(1).dot(tail.d_vel_d_T);

        CostEvaluation out;
        out.parts.energy = energy.cost;
        out.parts.time = w.rho_time * duration;
        out.parts.penalties = pen.integrals;
        out.parts.regularizer = reg.value;
        out.cost = energy.cost + w.rho_time * duration + pen.cost + w.w_t * reg.value;
        out.parts.total = out.cost;
        out.degenerate_samples = pen.degenerate_samples;

        out.grad.resize(x.size());
        out.grad(0) = d_duration * duration;
        out.grad.segment(1, g.d_points.size()) = g.d_points.reshaped();
        out.grad.segment(1 + g.d_points.size(), 2) = tail.d_vel_d_vt.transpose() * g.d_tail.col(1) + w.w_t * reg.grad;
        out.grad(x.size() - 1) = g.d_tail.col(2).dot(tail.d_acc_d_tau_f);
        return out;
    }

    DecisionVector initial_guess(const Scenario &scenario)
    {
        const int pieces = scenario.solver.pieces;
        const PerchSpec &spec = scenario.platform.spec;

        DecisionVector d;
        d.v_t.setZero();
        d.tau_f = scenario.solver.initial_phase == InitialPhase::MidThrust
                      ? 0.0
                      : 0.5 * (scenario.limits.tau_max + scenario.limits.tau_min);

        double duration = 1.0;
        if (scenario.solver.initial_duration == InitialDuration::Distance)
        {
            const Vec3 goal = scenario.platform.position(0.0) + scenario.geometry.l_bar * spec.z_d;
            duration = std::max(1.0, 2.0 * (goal - scenario.initial.p).norm() / scenario.limits.v_max);
        }
        d.T_prime = std::log(duration);

        // Single degree-7 polynomial matching both boundary states.
        const TerminalState tail = terminal_state(d.terminal(), scenario.platform, scenario.geometry,
                                                  scenario.limits, duration);
        Eigen::Matrix<double, kCoeffs, kCoeffs> m;
        Eigen::Matrix<double, kCoeffs, 3> rhs;
        const Eigen::Matrix<double, 3, 4> head = scenario.initial.matrix();
        const Eigen::Matrix<double, 3, 4> end = tail.state.matrix();
        for (int k = 0; k < 4; ++k)
        {
            m.row(k) = monomial_basis(0.0, k);
            m.row(4 + k) = monomial_basis(duration, k);
            rhs.row(k) = head.col(k).transpose();
            rhs.row(4 + k) = end.col(k).transpose();
        }
        const Eigen::Matrix<double, kCoeffs, 3> c = m.fullPivLu().solve(rhs);

        d.q.resize(3, pieces - 1);
        for (int i = 1; i < pieces; ++i)
        {
            d.q.col(i - 1) = (monomial_basis(duration * i / pieces, 0) * c).transpose();
        }
        return d;
    }

    const char *to_string(SolveStatus s)
    {
        switch (s)
        {
        case SolveStatus::Converged:
            return "converged";
        case SolveStatus::MaxIterations:
            return "max-iterations";
        case SolveStatus::LineSearchFailure:
            return "line-search-failure";
        }
        return "unknown";
    }

    PlanResult solve(const Scenario &scenario, const std::optional<DecisionVector> &start)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const int pieces = scenario.solver.pieces;

        Eigen::VectorXd x = (start ? *start : initial_guess(scenario)).pack();
        if (x.size() != DecisionVector::packed_size(pieces))
        {
            throw std::invalid_argument("warm start does not match the scenario piece count");
        }

        const bool free_terminal = scenario.free_terminal;
        const lbfgs::Objective objective = [&](const Eigen::VectorXd &v, Eigen::VectorXd &grad) {
            try
            {
                CostEvaluation ev = cost_and_grad(v, scenario);
                grad = std::move(ev.grad);
                if (!free_terminal)
                {
                    grad.tail<3>().setZero();
                }
                return ev.cost;
            }
            catch (const std::exception &)
            {
                grad.setZero();
                return std::numeric_limits<double>::infinity();
            }
        };

        lbfgs::Params params;
        params.memory = scenario.solver.history_size;
        params.g_epsilon = scenario.solver.gradient_tolerance;
        params.past = scenario.solver.stagnation_window;
        params.delta = scenario.solver.stagnation_tolerance;
        params.max_iterations = scenario.solver.max_iterations;
        params.max_linesearch = scenario.solver.max_linesearch;
        params.f_dec_coeff = scenario.solver.armijo;
        params.s_curv_coeff = scenario.solver.wolfe;

        const lbfgs::Result r = lbfgs::minimize(objective, x, params);

        PlanResult out;
        out.decision = DecisionVector::unpack(x, pieces);
        out.spline = build_trajectory(out.decision, scenario);
        out.terminal = out.decision.terminal();
        out.duration = out.decision.duration();
        out.iterations = r.iterations;
        out.evaluations = r.evaluations;
        out.solver_status = r.status;
        switch (r.status)
        {
        case lbfgs::Status::GradientTolerance:
        case lbfgs::Status::Stagnation:
            out.status = SolveStatus::Converged;
            break;
        case lbfgs::Status::MaxIterations:
            out.status = SolveStatus::MaxIterations;
            break;
        case lbfgs::Status::LineSearchFailure:
            out.status = SolveStatus::LineSearchFailure;
            break;
        }
        const auto t1 = std::chrono::steady_clock::now();
        out.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        const CostEvaluation final_eval = cost_and_grad(x, scenario);
        out.cost = final_eval.cost;
        out.parts = final_eval.parts;
        return out;
    }

    Scenario advance(const Scenario &scenario, const PlanResult &plan, double elapsed)
    {
        Scenario next = scenario;
        const FlatState now = plan.spline.eval(std::clamp(elapsed, 0.0, plan.duration));
        next.initial = BoundaryState{now.p, now.v, now.a, now.j};
        next.platform = scenario.platform.advanced(elapsed);
        return next;
    }

    DecisionVector shifted_start(const PlanResult &previous, double elapsed, int pieces)
    {
        if (elapsed == 0.0 && pieces == previous.spline.pieces())
        {
            return previous.decision;
        }
        const double remaining = std::max(previous.duration - elapsed, 1e-3 * previous.duration);
        const double offset = previous.duration - remaining;
        DecisionVector d;
        d.T_prime = std::log(remaining);
        d.v_t = previous.terminal.v_t;
        d.tau_f = previous.terminal.tau_f;
        d.q.resize(3, pieces - 1);
        for (int i = 1; i < pieces; ++i)
        {
            d.q.col(i - 1) = previous.spline.eval(offset + remaining * i / pieces, 0).p;
        }
        return d;
    }

    PlanResult replan(const Scenario &updated, const PlanResult &previous, double elapsed)
    {
        return solve(updated, shifted_start(previous, elapsed, updated.solver.pieces));
    }

} // namespace perch
