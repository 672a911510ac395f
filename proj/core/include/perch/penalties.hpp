#pragma once

#include "perch/platform.hpp"
#include "perch/smoothing.hpp"
#include "perch/spline.hpp"
#include "perch/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace perch
{
    struct PenaltyWeights
    {
        double w_tau = 1e4;
        double w_omega = 1e4;
        double w_v = 1e4;
        double w_g = 1e4;
        double w_c = 1e4;
        double w_t = 1e2;      // tangential terminal speed regularizer
        double rho_time = 1.0; // weight of the duration in the base cost
    };

    /// Trapezoidal rule with kappa intervals per piece.
    struct QuadratureSpec
    {
        int kappa = 16;

        /// (1/2, 1, ..., 1, 1/2), kappa + 1 entries.
        std::vector<double> weights() const;
    };

    /// One sampled penalty and its partial derivatives. d_t is the explicit dependence on
    /// absolute time through the platform motion.
    struct PenaltyTerm
    {
        double value = 0.0;
        Vec3 d_p = Vec3::Zero();
        Vec3 d_v = Vec3::Zero();
        Vec3 d_a = Vec3::Zero();
        Vec3 d_j = Vec3::Zero();
        double d_t = 0.0;
    };

    PenaltyTerm g_thrust(const FlatState &x, const ActuatorLimits &limits, double g_bar, double mu);
    PenaltyTerm g_bodyrate(const FlatState &x, const ActuatorLimits &limits, double g_bar, double mu);
    PenaltyTerm g_velocity(const FlatState &x, const ActuatorLimits &limits, double mu);
    PenaltyTerm g_ground(const FlatState &x, const ActuatorLimits &limits, double mu);

    /// Signed distance-like margin of the disc to the perching half-space: non-positive iff the
    /// whole disc is on the allowed side. value = r |B^T R^T a| + a^T (p - l z_b) - b.
    PenaltyTerm support_margin(const FlatState &x, const PlatformState &platform,
                               const VehicleGeometry &geometry);

    /// Half-space violation of the disc, gated smoothly on proximity to the landing point
    /// (active inside d_bar).
    PenaltyTerm g_collision(const FlatState &x, const PlatformState &platform,
                            const VehicleGeometry &geometry, const SmoothingParams &smoothing,
                            double d_bar);

    struct PenaltyContext
    {
        const PlatformModel &platform;
        const VehicleGeometry &geometry;
        const ActuatorLimits &limits;
        const PenaltyWeights &weights;
        const SmoothingParams &smoothing;
        const QuadratureSpec &quadrature;
    };

    /// Unweighted time integrals J_tau, J_omega, J_v, J_g, J_c.
    struct PenaltyIntegrals
    {
        double thrust = 0.0;
        double bodyrate = 0.0;
        double velocity = 0.0;
        double ground = 0.0;
        double collision = 0.0;
    };

    struct Accumulated
    {
        PenaltyIntegrals integrals;
        double cost = 0.0;              // sum of w * J
        Eigen::MatrixXd d_coeffs;       // 8N x 3
        Eigen::VectorXd d_times;        // per piece, coefficients held fixed
        double d_total_explicit = 0.0;  // through platform time only
        int degenerate_samples = 0;     // samples that fell back to the thrust barrier
    };

    /// Trapezoidal quadrature of every weighted penalty over every piece.
    Accumulated accumulate(const PerchSpline &spline, const PenaltyContext &ctx);

} // namespace perch
