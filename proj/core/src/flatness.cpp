#include "perch/flatness.hpp"

#include <cmath>

namespace perch::flatness
{
    namespace
    {
        void require_nonzero(const Vec3 &x, const char *what)
        {
            const double n = x.norm();
            if (!(n > 0.0) || !std::isfinite(n))
            {
                throw DegenerateStateError(std::string(what) + ": zero or non-finite vector");
            }
        }

        void require_not_inverted(const Vec3 &zb)
        {
            if (!(1.0 + zb.z() > kHopfGuard))
            {
                throw DegenerateStateError("yaw-free attitude undefined for an inverted body axis");
            }
        }
    } // namespace

    Vec3 net_thrust(const Vec3 &acc, double g_bar)
    {
        return acc + Vec3(0.0, 0.0, g_bar);
    }

    Vec3 zb_from_thrust(const Vec3 &tau)
    {
        require_nonzero(tau, "zb_from_thrust");
        return tau.normalized();
    }

    Mat3 f_dn(const Vec3 &x)
    {
        require_nonzero(x, "f_dn");
        const double sq = x.squaredNorm();
        return (Mat3::Identity() - x * x.transpose() / sq) / std::sqrt(sq);
    }

    Vec3 zb_dot(const Vec3 &tau, const Vec3 &jerk)
    {
        return f_dn(tau) * jerk;
    }

    BodyRateSq body_rate_sq(const Vec3 &tau, const Vec3 &jerk)
    {
        require_nonzero(tau, "body_rate_sq");
        const double n = tau.norm();
        const Vec3 z = tau / n;
        const Vec3 w = (jerk - z * z.dot(jerk)) / n;
        const double sq = w.squaredNorm();

        BodyRateSq out;
        out.value = sq;
        // |w|^2 = (|j|^2 - (z.j)^2) / n^2; f_dn is symmetric so d/dj = 2 f_dn w = 2 w / n.
        out.d_jerk = 2.0 * w / n;
        out.d_tau = -2.0 * z.dot(jerk) * w / (n * n) - 2.0 * sq * z / n;
        return out;
    }

    Eigen::Vector4d quat_from_zb(const Vec3 &zb)
    {
        require_not_inverted(zb);
        const double a = zb.x(), b = zb.y(), c = zb.z();
        return Eigen::Vector4d(1.0 + c, -b, a, 0.0) / std::sqrt(2.0 * (1.0 + c));
    }

    Mat3 rotation_from_quat(const Eigen::Vector4d &q)
    {
        return Eigen::Quaterniond(q(0), q(1), q(2), q(3)).toRotationMatrix();
    }

    Eigen::Matrix<double, 2, 3> disc_basis_in_world(const Vec3 &zb)
    {
        require_not_inverted(zb);
        const double a = zb.x(), b = zb.y(), h = 1.0 + zb.z();
        Eigen::Matrix<double, 2, 3> m;
        m << 1.0 - a * a / h, -a * b / h, -a,
            -a * b / h, 1.0 - b * b / h, -b;
        return m;
    }

    DiscSupport disc_support(const Vec3 &zb, const Vec3 &n, double radius)
    {
        const Eigen::Matrix<double, 2, 3> m = disc_basis_in_world(zb);
        const Eigen::Vector2d y = m * n;
        const double norm = y.norm();

        DiscSupport out;
        out.value = radius * norm;
        if (norm < 1e-12)
        {
            return out;
        }

        const double a = zb.x(), b = zb.y(), h = 1.0 + zb.z();
        const double k = a * n.x() + b * n.y();
        Eigen::Matrix<double, 2, 3> jac; // d y / d (a, b, c)
        jac << -(k + a * n.x()) / h - n.z(), -a * n.y() / h, a * k / (h * h),
            -b * n.x() / h, -(k + b * n.y()) / h - n.z(), b * k / (h * h);
        out.d_zb = radius * jac.transpose() * y / norm;
        return out;
    }

} // namespace perch::flatness
