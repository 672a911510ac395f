#include "perch/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace perch::lbfgs
{
    namespace
    {
        enum class SearchOutcome
        {
            Accepted,
            Failed,
        };

        SearchOutcome line_search(const Objective &objective, Eigen::VectorXd &x, double &f, Eigen::VectorXd &g,
                                  double &step, const Eigen::VectorXd &d, const Eigen::VectorXd &xp,
                                  const Params &params, int &evaluations)
        {
            const double f_init = f;
            const double dg_init = g.dot(d);
            if (!(dg_init < 0.0))
            {
                return SearchOutcome::Failed;
            }
            const double dec_test = params.f_dec_coeff * dg_init;
            const double curv_test = params.s_curv_coeff * dg_init;

            bool bracketed = false;
            double lo = 0.0, hi = params.max_step;
            Eigen::VectorXd g_trial(g.size());
            for (int count = 1;; ++count)
            {
                const Eigen::VectorXd x_trial = xp + step * d;
                const double f_trial = objective(x_trial, g_trial);
                ++evaluations;

                if (!std::isfinite(f_trial) || f_trial > f_init + step * dec_test)
                {
                    hi = step;
                    bracketed = true;
                }
                else if (g_trial.dot(d) < curv_test)
                {
                    lo = step;
                }
                else
                {
                    x = x_trial;
                    f = f_trial;
                    g = g_trial;
                    return SearchOutcome::Accepted;
                }

                if (count >= params.max_linesearch)
                {
                    return SearchOutcome::Failed;
                }
                if (bracketed && (hi - lo) < params.machine_prec * hi)
                {
                    return SearchOutcome::Failed;
                }
                step = bracketed ? 0.5 * (lo + hi) : 2.0 * step;
                if (step < params.min_step || step > params.max_step)
                {
                    return SearchOutcome::Failed;
                }
            }
        }

        bool gradient_small(const Eigen::VectorXd &x, const Eigen::VectorXd &g, double eps)
        {
            const double xn = std::max(1.0, x.lpNorm<Eigen::Infinity>());
            return g.lpNorm<Eigen::Infinity>() / xn < eps;
        }
    } // namespace

    Result minimize(const Objective &objective, Eigen::VectorXd &x, const Params &params)
    {
        const Eigen::Index n = x.size();
        const int m = std::max(1, params.memory);

        Result result;
        Eigen::VectorXd g(n);
        double f = objective(x, g);
        result.evaluations = 1;
        result.history.push_back(f);
        result.cost = f;

        if (!std::isfinite(f))
        {
            result.status = Status::LineSearchFailure;
            return result;
        }
        if (gradient_small(x, g, params.g_epsilon))
        {
            result.status = Status::GradientTolerance;
            return result;
        }

        Eigen::MatrixXd s_hist(n, m), y_hist(n, m);
        Eigen::VectorXd rho(m), alpha(m);
        int stored = 0, newest = -1;

        Eigen::VectorXd d = -g;
        double step = 1.0 / std::max(d.norm(), 1e-300);

        for (;;)
        {
            const Eigen::VectorXd xp = x;
            const Eigen::VectorXd gp = g;
            const double fp = f;

            if (line_search(objective, x, f, g, step, d, xp, params, result.evaluations) != SearchOutcome::Accepted)
            {
                x = xp;
                f = fp;
                g = gp;
                result.status = Status::LineSearchFailure;
                break;
            }
            ++result.iterations;
            result.history.push_back(f);

            if (gradient_small(x, g, params.g_epsilon))
            {
                result.status = Status::GradientTolerance;
                break;
            }
            if (params.past > 0 && result.iterations >= params.past)
            {
                const double f_past = result.history[result.history.size() - 1 - static_cast<std::size_t>(params.past)];
                if ((f_past - f) / std::max(1.0, std::abs(f)) < params.delta)
                {
                    result.status = Status::Stagnation;
                    break;
                }
            }
            if (params.max_iterations > 0 && result.iterations >= params.max_iterations)
            {
                result.status = Status::MaxIterations;
                break;
            }

            const Eigen::VectorXd s = x - xp;
            const Eigen::VectorXd y = g - gp;
            const double ys = y.dot(s);
            const double yy = y.squaredNorm();
            // Pairs without positive curvature would break the inverse-Hessian update.
            if (ys > std::numeric_limits<double>::epsilon() * yy)
            {
                newest = (newest + 1) % m;
                s_hist.col(newest) = s;
                y_hist.col(newest) = y;
                rho(newest) = 1.0 / ys;
                stored = std::min(stored + 1, m);
            }

            d = -g;
            if (stored > 0)
            {
                int k = newest;
                for (int c = 0; c < stored; ++c)
                {
                    alpha(k) = rho(k) * s_hist.col(k).dot(d);
                    d -= alpha(k) * y_hist.col(k);
                    k = (k + m - 1) % m;
                }
                const double gamma = 1.0 / (rho(newest) * y_hist.col(newest).squaredNorm());
                d *= gamma;
                k = (newest + m - stored + 1) % m;
                for (int c = 0; c < stored; ++c)
                {
                    const double beta = rho(k) * y_hist.col(k).dot(d);
                    d += (alpha(k) - beta) * s_hist.col(k);
                    k = (k + 1) % m;
                }
            }
            if (!(d.dot(g) < 0.0))
            {
                d = -g;
                stored = 0;
            }
            step = 1.0;
        }

        result.cost = f;
        return result;
    }

    const char *to_string(Status s)
    {
        switch (s)
        {
        case Status::GradientTolerance:
            return "gradient-tolerance";
        case Status::Stagnation:
            return "stagnation";
        case Status::MaxIterations:
            return "max-iterations";
        case Status::LineSearchFailure:
            return "line-search-failure";
        }
        return "unknown";
    }

} // namespace perch::lbfgs
