#pragma once

#include "perch/penalties.hpp"
#include "perch/platform.hpp"
#include "perch/smoothing.hpp"
#include "perch/types.hpp"

#include <string>

namespace perch
{
    enum class InitialDuration
    {
        Distance, // max(1, 2 |p_T - p_0| / v_max)
        Unit,     // T' = 0, i.e. one second
    };

    enum class InitialPhase
    {
        MidThrust, // tau_f = 0, terminal thrust (tau_max + tau_min) / 2
        Literal,   // tau_f = (tau_max + tau_min) / 2 rad
    };

    struct SolverConfig
    {
        int pieces = 10;
        int max_iterations = 1000;
        double gradient_tolerance = 1e-5;
        int history_size = 8;
        double armijo = 1e-4;
        double wolfe = 0.9;
        int stagnation_window = 3;
        double stagnation_tolerance = 1e-7;
        int max_linesearch = 64;
        InitialDuration initial_duration = InitialDuration::Distance;
        InitialPhase initial_phase = InitialPhase::MidThrust;
    };

    /// Everything one solve needs.
    struct Scenario
    {
        std::string name = "unnamed";
        BoundaryState initial;
        PlatformModel platform;
        VehicleGeometry geometry;
        ActuatorLimits limits;
        PenaltyWeights weights;
        SmoothingParams smoothing;
        QuadratureSpec quadrature;
        SolverConfig solver;
        bool free_terminal = true; // false holds v_t = 0 and tau_f at its initial value

        /// Throws std::invalid_argument naming the first violated invariant.
        void validate() const;
    };

    /// Surface normal of an inclined surface in the x-z plane, slope in degrees.
    /// -90 is a vertical wall facing -x, 0 a floor facing up.
    Vec3 surface_normal_from_slope(double slope_deg);

} // namespace perch
