#pragma once

#include "perch/optimizer.hpp"
#include "perch/scenario.hpp"
#include "perch/terminal.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace perch::validator
{
    /// Worst excess of one constraint over its limit (0 if never exceeded) and when it occurs.
    struct Violation
    {
        double worst = 0.0;
        double time = 0.0;
    };

    struct ConstraintReport
    {
        Violation velocity;  // m/s
        Violation bodyrate;  // rad/s
        Violation thrust;    // m/s^2, either bound
        Violation ground;    // m
        Violation collision; // m, disc beyond the perching plane while within d_bar

        double max_speed = 0.0;
        double max_bodyrate = 0.0;
        double min_thrust = 0.0;
        double max_thrust = 0.0;
        double min_altitude = 0.0;
        double min_altitude_time = 0.0;

        double terminal_position_error = 0.0; // m
        double terminal_velocity_error = 0.0; // m/s; normal component only if v_t is unknown
        double terminal_normal_speed = 0.0;   // relative speed into the surface, m/s
        double terminal_tangential_speed = 0.0;
        double terminal_zb_angle = 0.0;       // rad
        double terminal_jerk = 0.0;           // m/s^3

        double duration = 0.0;
        int samples = 0;
        double slack = 0.0;
        double terminal_tolerance = 0.0;
        bool pass = false;
    };

    /// One row of a sampled trajectory.
    struct TraceSample
    {
        double t = 0.0;
        Vec3 p = Vec3::Zero();
        Vec3 v = Vec3::Zero();
        Vec3 a = Vec3::Zero();
        Vec3 j = Vec3::Zero();
    };

    inline constexpr double kDefaultSlack = 0.05;
    inline constexpr double kDefaultTerminalTolerance = 1e-6;

    /// Exact (unsmoothed) constraint evaluation on samples. The last sample is taken as the
    /// terminal state. With terminal vars the full terminal velocity is checked, otherwise
    /// only its normal component.
    ConstraintReport check_samples(const std::vector<TraceSample> &samples, const Scenario &scenario,
                                   const std::optional<TerminalVars> &terminal = std::nullopt,
                                   double slack = kDefaultSlack,
                                   double terminal_tolerance = kDefaultTerminalTolerance);

    /// Samples plan at step dt (dt <= 0 selects T / 2000) and checks every constraint.
    ConstraintReport check(const PlanResult &plan, const Scenario &scenario, double dt = 0.0,
                           double slack = kDefaultSlack,
                           double terminal_tolerance = kDefaultTerminalTolerance);

    /// Uniform samples t_k = k T / count, k = 0..count, endpoint included.
    std::vector<TraceSample> sample(const PerchSpline &spline, int count);

    struct AuditResult
    {
        double max_relative_error = 0.0;
        std::vector<double> per_probe;
        bool finite = true;
    };

    /// Compares cost_and_grad with central differences at random decision vectors around the
    /// cold-start guess. relative error = |g - g_fd|_inf / max(1, |g_fd|_inf).
    AuditResult gradient_audit(const Scenario &scenario, int n_probes, std::uint64_t seed = 7,
                               bool include_zero_probe = true, double step = 1e-6);

    struct RimResult
    {
        double worst = 0.0;   // max over rim points of a^T x - b
        double azimuth = 0.0; // rad, in the disc frame built from z_b
    };

    /// Brute-force supremum of a^T x - b over n_rim points on the disc boundary.
    RimResult disc_oracle(const FlatState &state, const PlatformState &platform,
                          const VehicleGeometry &geometry, int n_rim);

    /// Coefficients (8N x 3) of the minimum-snap interpolant from a dense KKT solve.
    Eigen::MatrixXd dense_kkt_spline(const BoundaryState &head, const BoundaryState &tail,
                                     const Eigen::Matrix3Xd &points, double total_duration);

} // namespace perch::validator
