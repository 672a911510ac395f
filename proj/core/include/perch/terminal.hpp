#pragma once

#include "perch/platform.hpp"
#include "perch/types.hpp"

namespace perch
{
    /// Free terminal variables: tangential relative velocity and the thrust phase.
    struct TerminalVars
    {
        Vec2 v_t = Vec2::Zero();
        double tau_f = 0.0;
    };

    /// Orthonormal basis of the plane perpendicular to z_d. The first column is the
    /// Gram-Schmidt image of the coordinate axis least aligned with z_d, the second is
    /// z_d x v1.
    Eigen::Matrix<double, 3, 2> tangent_basis(const Vec3 &z_d);

    Vec3 terminal_velocity(const Vec2 &v_t, const Vec3 &platform_velocity, const PerchSpec &spec);

    /// Terminal acceleration whose net thrust points along z_d with magnitude
    /// tau_m + tau_r sin(tau_f), always inside [tau_min, tau_max].
    Vec3 terminal_acceleration(double tau_f, const PerchSpec &spec, const ActuatorLimits &limits,
                               double g_bar);

    /// Terminal boundary state together with its sensitivities.
    struct TerminalState
    {
        BoundaryState state;
        Eigen::Matrix<double, 3, 2> d_vel_d_vt; // = V
        Vec3 d_acc_d_tau_f = Vec3::Zero();
        Vec3 d_pos_d_T = Vec3::Zero();
        Vec3 d_vel_d_T = Vec3::Zero();
    };

    /// Perching state at time T. The centroid sits l_bar along z_d from the landing point
    /// so the disc underside touches the surface; jerk is zero.
    TerminalState terminal_state(const TerminalVars &vars, const PlatformModel &platform,
                                 const VehicleGeometry &geometry, const ActuatorLimits &limits,
                                 double duration);

    struct Regularizer
    {
        double value = 0.0;
        Vec2 grad = Vec2::Zero();
    };

    /// |v_t|^2.
    Regularizer tangential_regularizer(const Vec2 &v_t);

} // namespace perch
