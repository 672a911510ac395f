#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace perch::lbfgs
{
    struct Params
    {
        int memory = 8;               // correction pairs kept
        double g_epsilon = 1e-5;      // stop when |g|_inf / max(1, |x|_inf) < g_epsilon
        int past = 3;                 // window of the stagnation test, 0 disables it
        double delta = 1e-7;          // stop when (f_past - f) / max(1, |f|) < delta
        int max_iterations = 1000;    // 0 means unbounded
        int max_linesearch = 64;
        double min_step = 1e-20;
        double max_step = 1e20;
        double f_dec_coeff = 1e-4;    // sufficient decrease
        double s_curv_coeff = 0.9;    // weak Wolfe curvature
        double machine_prec = 1e-16;
    };

    enum class Status
    {
        GradientTolerance,
        Stagnation,
        MaxIterations,
        LineSearchFailure,
    };

    struct Result
    {
        Status status = Status::MaxIterations;
        double cost = 0.0;
        int iterations = 0;
        int evaluations = 0;
        std::vector<double> history; // accepted cost per iteration, starting with f(x0)
    };

    /// Returns f(x) and writes the gradient into g (already sized like x).
    using Objective = std::function<double(const Eigen::VectorXd &x, Eigen::VectorXd &g)>;

    /// Limited-memory BFGS with a Lewis-Overton weak-Wolfe bracketing line search.
    /// x is overwritten with the best accepted iterate. Accepted costs never increase.
    Result minimize(const Objective &objective, Eigen::VectorXd &x, const Params &params = {});

    const char *to_string(Status s);

} // namespace perch::lbfgs
