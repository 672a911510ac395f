#pragma once

#include "perch/types.hpp"

namespace perch
{
    /// Desired perching condition on the target surface.
    struct PerchSpec
    {
        Vec3 z_d = Vec3::UnitZ(); // outward unit normal of the landing surface
        double v_n_bar = 0.3;     // approach speed along -z_d relative to the surface, m/s
        double d_bar = 0.5;       // surface radius gating the collision constraint, m
    };

    /// Snapshot of the landing surface at one time.
    struct PlatformState
    {
        Vec3 position = Vec3::Zero();
        Vec3 velocity = Vec3::Zero();
        Vec3 a = Vec3::Zero(); // half-space {x : a^T x <= b}, a = -z_d
        double b = 0.0;
        double b_rate = 0.0;   // db/dt
    };

    /// Constant-velocity motion model of the landing point.
    struct PlatformModel
    {
        Vec3 rho0 = Vec3::Zero();
        Vec3 vel = Vec3::Zero();
        PerchSpec spec;

        Vec3 position(double t) const { return rho0 + vel * t; }
        Vec3 velocity(double /*t*/) const { return vel; }

        /// Position, velocity and the perching half-space at time t.
        PlatformState at(double t) const
        {
            PlatformState s;
            s.position = position(t);
            s.velocity = velocity(t);
            s.a = -spec.z_d;
            s.b = s.a.dot(s.position);
            s.b_rate = s.a.dot(s.velocity);
            return s;
        }

        /// The same surface observed dt seconds later.
        PlatformModel advanced(double dt) const
        {
            PlatformModel m = *this;
            m.rho0 = position(dt);
            return m;
        }
    };

} // namespace perch
