#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace perch
{
    using Vec2 = Eigen::Vector2d;
    using Vec3 = Eigen::Vector3d;
    using Mat3 = Eigen::Matrix3d;

    /// Position and its time derivatives up to snap at one instant.
    struct FlatState
    {
        Vec3 p = Vec3::Zero();
        Vec3 v = Vec3::Zero();
        Vec3 a = Vec3::Zero();
        Vec3 j = Vec3::Zero();
        Vec3 s = Vec3::Zero();

        bool finite() const
        {
            return p.allFinite() && v.allFinite() && a.allFinite() && j.allFinite() && s.allFinite();
        }
    };

    /// Position through jerk at one end of a spline. Column k of matrix() holds derivative k.
    struct BoundaryState
    {
        Vec3 p = Vec3::Zero();
        Vec3 v = Vec3::Zero();
        Vec3 a = Vec3::Zero();
        Vec3 j = Vec3::Zero();

        Eigen::Matrix<double, 3, 4> matrix() const
        {
            Eigen::Matrix<double, 3, 4> m;
            m << p, v, a, j;
            return m;
        }

        static BoundaryState from_matrix(const Eigen::Matrix<double, 3, 4> &m)
        {
            return BoundaryState{m.col(0), m.col(1), m.col(2), m.col(3)};
        }

        bool finite() const { return matrix().allFinite(); }
    };

    struct VehicleGeometry
    {
        double g_bar = 9.81; // m/s^2
        double l_bar = 0.04; // centroid to bottom, m
        double r_bar = 0.10; // disc radius, m
    };

    struct ActuatorLimits
    {
        double v_max = 6.0;     // m/s
        double omega_max = 3.0; // rad/s
        double tau_min = 5.0;   // m/s^2
        double tau_max = 15.0;  // m/s^2
        double z_min = 0.4;     // m
    };

    /// Raised when the flatness map hits zero thrust or the upside-down attitude singularity.
    class DegenerateStateError : public std::domain_error
    {
    public:
        explicit DegenerateStateError(const std::string &what) : std::domain_error(what) {}
    };

} // namespace perch
