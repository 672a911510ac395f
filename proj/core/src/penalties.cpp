#include "perch/penalties.hpp"

#include "perch/flatness.hpp"

#include <cmath>

namespace perch
{
    namespace
    {
        // Samples with thrust below this cannot be mapped to an attitude.
        constexpr double kThrustFloor = 1e-6;
        constexpr double kBarrierWeight = 1e6;

        // Replaces attitude-dependent penalties of a degenerate sample. Pushes |tau| up.
        PenaltyTerm thrust_barrier(const Vec3 &tau, const ActuatorLimits &limits)
        {
            const double gap = limits.tau_min * limits.tau_min - tau.squaredNorm();
            PenaltyTerm t;
            t.value = kBarrierWeight * gap * gap;
            t.d_a = -4.0 * kBarrierWeight * gap * tau;
            return t;
        }

        // Replaces the collision penalty when the body axis is (nearly) inverted.
        PenaltyTerm inversion_barrier(const Vec3 &tau)
        {
            const Vec3 zb = tau.normalized();
            const double gap = 1.0 - zb.z();
            PenaltyTerm t;
            t.value = kBarrierWeight * gap * gap;
            t.d_a = flatness::f_dn(tau) * Vec3(0.0, 0.0, -2.0 * kBarrierWeight * gap);
            return t;
        }

        void add_scaled(PenaltyTerm &acc, const PenaltyTerm &t, double w)
        {
            acc.value += w * t.value;
            acc.d_p += w * t.d_p;
            acc.d_v += w * t.d_v;
            acc.d_a += w * t.d_a;
            acc.d_j += w * t.d_j;
            acc.d_t += w * t.d_t;
        }
    } // namespace

    std::vector<double> QuadratureSpec::weights() const
    {
        std::vector<double> w(static_cast<std::size_t>(kappa) + 1, 1.0);
        w.front() = 0.5;
        w.back() = 0.5;
        return w;
    }

    PenaltyTerm g_thrust(const FlatState &x, const ActuatorLimits &limits, double g_bar, double mu)
    {
        const Vec3 tau = flatness::net_thrust(x.a, g_bar);
        const double sq = tau.squaredNorm();
        const Smoothed hi = l_mu(sq - limits.tau_max * limits.tau_max, mu);
        const Smoothed lo = l_mu(limits.tau_min * limits.tau_min - sq, mu);
        PenaltyTerm t;
        t.value = hi.value + lo.value;
        t.d_a = 2.0 * (hi.derivative - lo.derivative) * tau;
        return t;
    }

    PenaltyTerm g_bodyrate(const FlatState &x, const ActuatorLimits &limits, double g_bar, double mu)
    {
        const Vec3 tau = flatness::net_thrust(x.a, g_bar);
        const flatness::BodyRateSq rate = flatness::body_rate_sq(tau, x.j);
        const Smoothed pen = l_mu(rate.value - limits.omega_max * limits.omega_max, mu);
        PenaltyTerm t;
        t.value = pen.value;
        t.d_a = pen.derivative * rate.d_tau;
        t.d_j = pen.derivative * rate.d_jerk;
        return t;
    }

    PenaltyTerm g_velocity(const FlatState &x, const ActuatorLimits &limits, double mu)
    {
        const Smoothed pen = l_mu(x.v.squaredNorm() - limits.v_max * limits.v_max, mu);
        PenaltyTerm t;
        t.value = pen.value;
        t.d_v = 2.0 * pen.derivative * x.v;
        return t;
    }

    PenaltyTerm g_ground(const FlatState &x, const ActuatorLimits &limits, double mu)
    {
        // z|z| instead of z^2 so the penalty keeps growing below the ground plane.
        const double z = x.p.z();
        const Smoothed pen = l_mu(limits.z_min * limits.z_min - z * std::abs(z), mu);
        PenaltyTerm t;
        t.value = pen.value;
        t.d_p = Vec3(0.0, 0.0, -2.0 * pen.derivative * std::abs(z));
        return t;
    }

    PenaltyTerm support_margin(const FlatState &x, const PlatformState &platform,
                               const VehicleGeometry &geometry)
    {
        const Vec3 tau = flatness::net_thrust(x.a, geometry.g_bar);
        const Vec3 zb = flatness::zb_from_thrust(tau);
        const flatness::DiscSupport disc = flatness::disc_support(zb, platform.a, geometry.r_bar);
        const Vec3 center = x.p - geometry.l_bar * zb;

        PenaltyTerm t;
        t.value = disc.value + platform.a.dot(center) - platform.b;
        t.d_p = platform.a;
        t.d_a = flatness::f_dn(tau) * (disc.d_zb - geometry.l_bar * platform.a);
        t.d_t = -platform.b_rate;
        return t;
    }

    PenaltyTerm g_collision(const FlatState &x, const PlatformState &platform,
                            const VehicleGeometry &geometry, const SmoothingParams &smoothing,
                            double d_bar)
    {
        const Vec3 rel = x.p - platform.position;
        const Smoothed gate = l_eps(d_bar * d_bar - rel.squaredNorm(), smoothing.eps);
        if (gate.value == 0.0 && gate.derivative == 0.0)
        {
            return {};
        }
        const PenaltyTerm margin = support_margin(x, platform, geometry);
        const Smoothed pen = l_mu(margin.value, smoothing.mu);

        PenaltyTerm t;
        t.value = pen.value * gate.value;
        t.d_p = pen.derivative * gate.value * margin.d_p - 2.0 * pen.value * gate.derivative * rel;
        t.d_a = pen.derivative * gate.value * margin.d_a;
        t.d_t = pen.derivative * gate.value * margin.d_t + 2.0 * pen.value * gate.derivative * rel.dot(platform.velocity);
        return t;
    }

    Accumulated accumulate(const PerchSpline &spline, const PenaltyContext &ctx)
    {
        const int n = spline.pieces();
        const int kappa = ctx.quadrature.kappa;
        const double dt = spline.piece_duration();
        const std::vector<double> qw = ctx.quadrature.weights();
        const PenaltyWeights &w = ctx.weights;
        const double mu = ctx.smoothing.mu;
        const double g_bar = ctx.geometry.g_bar;

        Accumulated out;
        out.d_coeffs = Eigen::MatrixXd::Zero(kCoeffs * n, 3);
        out.d_times = Eigen::VectorXd::Zero(n);

        // Every piece has the same duration, so the sample bases are shared.
        std::vector<Eigen::Matrix<double, 5, kCoeffs>> bases(static_cast<std::size_t>(kappa) + 1);
        for (int j = 0; j <= kappa; ++j)
        {
            bases[static_cast<std::size_t>(j)] = derivative_basis(dt * j / kappa);
        }

        for (int i = 0; i < n; ++i)
        {
            for (int j = 0; j <= kappa; ++j)
            {
                const double frac = static_cast<double>(j) / kappa;
                const double global_t = (i + frac) * dt;
                const Eigen::Matrix<double, 5, kCoeffs> &basis = bases[static_cast<std::size_t>(j)];
                const auto coeffs = spline.coefficients().middleRows<kCoeffs>(kCoeffs * i);
                const Eigen::Matrix<double, 5, 3> derivs = basis * coeffs;
                FlatState x;
                x.p = derivs.row(0).transpose();
                x.v = derivs.row(1).transpose();
                x.a = derivs.row(2).transpose();
                x.j = derivs.row(3).transpose();
                x.s = derivs.row(4).transpose();
                const PlatformState ps = ctx.platform.at(global_t);
                const Vec3 tau = flatness::net_thrust(x.a, g_bar);
                const bool no_attitude = tau.norm() < kThrustFloor;

                PenaltyTerm sample;
                double j_tau = 0.0, j_omega = 0.0, j_v = 0.0, j_g = 0.0, j_c = 0.0;

                if (w.w_tau > 0.0)
                {
                    const PenaltyTerm t = g_thrust(x, ctx.limits, g_bar, mu);
                    j_tau = t.value;
                    add_scaled(sample, t, w.w_tau);
                }
                if (w.w_v > 0.0)
                {
                    const PenaltyTerm t = g_velocity(x, ctx.limits, mu);
                    j_v = t.value;
                    add_scaled(sample, t, w.w_v);
                }
                if (w.w_g > 0.0)
                {
                    const PenaltyTerm t = g_ground(x, ctx.limits, mu);
                    j_g = t.value;
                    add_scaled(sample, t, w.w_g);
                }
                if (no_attitude)
                {
                    add_scaled(sample, thrust_barrier(tau, ctx.limits), 1.0);
                    ++out.degenerate_samples;
                }
                else
                {
                    if (w.w_omega > 0.0)
                    {
                        const PenaltyTerm t = g_bodyrate(x, ctx.limits, g_bar, mu);
                        j_omega = t.value;
                        add_scaled(sample, t, w.w_omega);
                    }
                    if (w.w_c > 0.0)
                    {
                        const Vec3 zb = tau.normalized();
                        const double reach = ctx.platform.spec.d_bar * ctx.platform.spec.d_bar + ctx.smoothing.eps;
                        const bool near = (x.p - ps.position).squaredNorm() < reach;
                        if (near && !(1.0 + zb.z() > flatness::kHopfGuard))
                        {
                            add_scaled(sample, inversion_barrier(tau), 1.0);
                            ++out.degenerate_samples;
                        }
                        else if (near)
                        {
                            const PenaltyTerm t = g_collision(x, ps, ctx.geometry, ctx.smoothing, ctx.platform.spec.d_bar);
                            j_c = t.value;
                            add_scaled(sample, t, w.w_c);
                        }
                    }
                }

                const double coef = qw[static_cast<std::size_t>(j)] * dt / kappa;
                out.integrals.thrust += coef * j_tau;
                out.integrals.bodyrate += coef * j_omega;
                out.integrals.velocity += coef * j_v;
                out.integrals.ground += coef * j_g;
                out.integrals.collision += coef * j_c;
                out.cost += coef * sample.value;

                Eigen::Matrix<double, 4, 3> partials;
                partials << sample.d_p.transpose(), sample.d_v.transpose(), sample.d_a.transpose(), sample.d_j.transpose();
                out.d_coeffs.middleRows<kCoeffs>(kCoeffs * i).noalias() += coef * basis.topRows<4>().transpose() * partials;

                const double drift = sample.d_p.dot(x.v) + sample.d_v.dot(x.a) + sample.d_a.dot(x.j) + sample.d_j.dot(x.s);
                out.d_times(i) += qw[static_cast<std::size_t>(j)] * sample.value / kappa + coef * frac * drift;
                out.d_total_explicit += coef * sample.d_t * (i + frac) / n;
            }
        }
        return out;
    }

} // namespace perch
