#include "perch/scenario.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace perch
{
    namespace
    {
        void require(bool ok, const char *what)
        {
            if (!ok)
            {
                throw std::invalid_argument(what);
            }
        }
    } // namespace

    void Scenario::validate() const
    {
        require(initial.finite(), "initial state must be finite");
        require(platform.rho0.allFinite() && platform.vel.allFinite(), "platform motion must be finite");
        require(std::abs(platform.spec.z_d.norm() - 1.0) < 1e-9, "z_d must be a unit vector");
        require(platform.spec.v_n_bar >= 0.0, "v_n_bar must be non-negative");
        require(platform.spec.d_bar > 0.0, "d_bar must be positive");
        require(geometry.g_bar > 0.0, "g_bar must be positive");
        require(geometry.l_bar >= 0.0, "l_bar must be non-negative");
        require(geometry.r_bar > 0.0, "r_bar must be positive");
        require(limits.v_max > 0.0, "v_max must be positive");
        require(limits.omega_max > 0.0, "omega_max must be positive");
        require(limits.tau_min > 0.0 && limits.tau_min < limits.tau_max, "need 0 < tau_min < tau_max");
        require(limits.z_min >= 0.0, "z_min must be non-negative");
        require(weights.w_tau >= 0.0 && weights.w_omega >= 0.0 && weights.w_v >= 0.0 && weights.w_g >= 0.0 &&
                    weights.w_c >= 0.0 && weights.w_t >= 0.0 && weights.rho_time >= 0.0,
                "penalty weights must be non-negative");
        require(smoothing.mu > 0.0 && smoothing.eps > 0.0, "smoothing widths must be positive");
        require(quadrature.kappa >= 2, "kappa must be at least 2");
        require(solver.pieces >= 2, "at least two pieces are required");
        require(solver.max_iterations >= 0, "max_iterations must be non-negative");
        require(solver.gradient_tolerance > 0.0, "gradient_tolerance must be positive");
        require(solver.history_size >= 1, "history_size must be positive");
        require(solver.armijo > 0.0 && solver.armijo < solver.wolfe && solver.wolfe < 1.0,
                "line search needs 0 < armijo < wolfe < 1");
        require(solver.stagnation_window >= 0 && solver.stagnation_tolerance >= 0.0, "invalid stagnation test");
        require(solver.max_linesearch >= 1, "max_linesearch must be positive");
    }

    Vec3 surface_normal_from_slope(double slope_deg)
    {
        const double r = slope_deg * std::numbers::pi / 180.0;
        return Vec3(std::sin(r), 0.0, std::cos(r));
    }

} // namespace perch
