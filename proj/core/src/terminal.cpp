#include "perch/terminal.hpp"

#include <cmath>

namespace perch
{
    Eigen::Matrix<double, 3, 2> tangent_basis(const Vec3 &z_d)
    {
        Eigen::Index axis = 0;
        z_d.cwiseAbs().minCoeff(&axis);
        Vec3 v1 = Vec3::Unit(axis);
        v1 = (v1 - z_d * z_d.dot(v1)).normalized();
        Eigen::Matrix<double, 3, 2> basis;
        basis.col(0) = v1;
        basis.col(1) = z_d.cross(v1).normalized();
        return basis;
    }

    Vec3 terminal_velocity(const Vec2 &v_t, const Vec3 &platform_velocity, const PerchSpec &spec)
    {
        return platform_velocity - spec.v_n_bar * spec.z_d + tangent_basis(spec.z_d) * v_t;
    }

    Vec3 terminal_acceleration(double tau_f, const PerchSpec &spec, const ActuatorLimits &limits,
                               double g_bar)
    {
        const double mid = 0.5 * (limits.tau_max + limits.tau_min);
        const double half = 0.5 * (limits.tau_max - limits.tau_min);
        return (mid + half * std::sin(tau_f)) * spec.z_d - Vec3(0.0, 0.0, g_bar);
    }

    TerminalState terminal_state(const TerminalVars &vars, const PlatformModel &platform,
                                 const VehicleGeometry &geometry, const ActuatorLimits &limits,
                                 double duration)
    {
        const PerchSpec &spec = platform.spec;
        const double half = 0.5 * (limits.tau_max - limits.tau_min);

        TerminalState out;
        out.state.p = platform.position(duration) + geometry.l_bar * spec.z_d;
        out.state.v = terminal_velocity(vars.v_t, platform.velocity(duration), spec);
        out.state.a = terminal_acceleration(vars.tau_f, spec, limits, geometry.g_bar);
        out.state.j = Vec3::Zero();
        out.d_vel_d_vt = tangent_basis(spec.z_d);
        out.d_acc_d_tau_f = half * std::cos(vars.tau_f) * spec.z_d;
        out.d_pos_d_T = platform.velocity(duration);
        out.d_vel_d_T = Vec3::Zero(); // constant-velocity model
        return out;
    }

    Regularizer tangential_regularizer(const Vec2 &v_t)
    {
        return {v_t.squaredNorm(), 2.0 * v_t};
    }

} // namespace perch
