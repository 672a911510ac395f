#pragma once

#include "perch/types.hpp"

#include <Eigen/Dense>

namespace perch::flatness
{
    /// Smallest admissible 1 + z_b.z before the yaw-free attitude is rejected.
    inline constexpr double kHopfGuard = 1e-6;

    /// Mass-normalized net thrust for a commanded acceleration. d(tau)/d(a) = I.
    Vec3 net_thrust(const Vec3 &acc, double g_bar);

    /// Body z axis aligned with the thrust. Throws DegenerateStateError for zero thrust.
    Vec3 zb_from_thrust(const Vec3 &tau);

    /// Jacobian of y -> y/|y| at x, (I - x x^T / x^T x) / |x|. Doubles as d(z_b)/d(tau).
    Mat3 f_dn(const Vec3 &x);

    /// Time derivative of the body z axis, f_dn(tau) * jerk.
    Vec3 zb_dot(const Vec3 &tau, const Vec3 &jerk);

    struct BodyRateSq
    {
        double value = 0.0; // omega_1^2 + omega_2^2
        Vec3 d_tau = Vec3::Zero();
        Vec3 d_jerk = Vec3::Zero();
    };

    /// Squared roll/pitch body rate |dz_b/dt|^2 with its gradients. Yaw rate is not modeled.
    BodyRateSq body_rate_sq(const Vec3 &tau, const Vec3 &jerk);

    /// Yaw-free unit quaternion (w, x, y, z) that rotates e3 onto z_b.
    Eigen::Vector4d quat_from_zb(const Vec3 &zb);

    /// Rotation matrix of a unit quaternion stored as (w, x, y, z).
    Mat3 rotation_from_quat(const Eigen::Vector4d &q);

    /// B^T R^T for the yaw-free attitude: rows are the world-frame disc axes.
    Eigen::Matrix<double, 2, 3> disc_basis_in_world(const Vec3 &zb);

    struct DiscSupport
    {
        double value = 0.0; // r * |B^T R^T n|
        Vec3 d_zb = Vec3::Zero();
    };

    /// Support function of the disc of radius r along direction n, differentiated in z_b.
    /// The norm is not differentiable when the disc is parallel to the plane; the zero
    /// subgradient is returned there.
    DiscSupport disc_support(const Vec3 &zb, const Vec3 &n, double radius);

} // namespace perch::flatness
