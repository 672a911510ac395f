#include "perch/validator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace perch::validator
{
    namespace
    {
        void record(Violation &v, double excess, double t)
        {
            if (excess > v.worst)
            {
                v.worst = excess;
                v.time = t;
            }
        }

        // Orthonormal pair spanning the plane normal to n.
        std::pair<Vec3, Vec3> plane_axes(const Vec3 &n)
        {
            const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
            const Vec3 e1 = n.cross(helper).normalized();
            return {e1, n.cross(e1)};
        }

        double factorial_ratio(int m, int k)
        {
            double r = 1.0;
            for (int i = 0; i < k; ++i)
            {
                r *= m - i;
            }
            return r;
        }

        // d^k/dt^k (1, t, ..., t^7), written out independently of the spline module.
        Eigen::RowVectorXd basis_row(double t, int k)
        {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(8);
            for (int m = k; m < 8; ++m)
            {
                r(m) = factorial_ratio(m, k) * std::pow(t, m - k);
            }
            return r;
        }
    } // namespace

    std::vector<TraceSample> sample(const PerchSpline &spline, int count)
    {
        count = std::max(count, 1);
        std::vector<TraceSample> out;
        out.reserve(static_cast<std::size_t>(count) + 1);
        for (int k = 0; k <= count; ++k)
        {
            const double t = spline.duration() * k / count;
            const FlatState x = spline.eval(t, 3);
            out.push_back({t, x.p, x.v, x.a, x.j});
        }
        return out;
    }

    ConstraintReport check_samples(const std::vector<TraceSample> &samples, const Scenario &scenario,
                                   const std::optional<TerminalVars> &terminal, double slack,
                                   double terminal_tolerance)
    {
        ConstraintReport rep;
        rep.slack = slack;
        rep.terminal_tolerance = terminal_tolerance;
        rep.samples = static_cast<int>(samples.size());
        if (samples.empty())
        {
            return rep;
        }

        const ActuatorLimits &lim = scenario.limits;
        const VehicleGeometry &geo = scenario.geometry;
        const PerchSpec &spec = scenario.platform.spec;
        const double g_bar = geo.g_bar;

        rep.min_thrust = std::numeric_limits<double>::infinity();
        rep.min_altitude = std::numeric_limits<double>::infinity();

        for (const TraceSample &s : samples)
        {
            const Vec3 tau = s.a + Vec3(0.0, 0.0, g_bar);
            const double thrust = tau.norm();
            const double speed = s.v.norm();
            double rate = 0.0;
            Vec3 zb = Vec3::UnitZ();
            if (thrust > 0.0)
            {
                zb = tau / thrust;
                rate = (s.j - zb * zb.dot(s.j)).norm() / thrust;
            }

            rep.max_speed = std::max(rep.max_speed, speed);
            rep.max_bodyrate = std::max(rep.max_bodyrate, rate);
            rep.max_thrust = std::max(rep.max_thrust, thrust);
            rep.min_thrust = std::min(rep.min_thrust, thrust);
            if (s.p.z() < rep.min_altitude)
            {
                rep.min_altitude = s.p.z();
                rep.min_altitude_time = s.t;
            }

            record(rep.velocity, speed - lim.v_max, s.t);
            record(rep.bodyrate, rate - lim.omega_max, s.t);
            record(rep.thrust, std::max(thrust - lim.tau_max, lim.tau_min - thrust), s.t);
            record(rep.ground, lim.z_min - s.p.z(), s.t);

            if (scenario.weights.w_c > 0.0)
            {
                const Vec3 rho = scenario.platform.position(s.t);
                if ((s.p - rho).norm() <= spec.d_bar)
                {
                    const Vec3 a = -spec.z_d;
                    const Vec3 center = s.p - geo.l_bar * zb;
                    // Support of a flat disc normal to z_b along a.
                    const double reach = geo.r_bar * (a - zb * zb.dot(a)).norm();
                    record(rep.collision, reach + a.dot(center) - a.dot(rho), s.t);
                }
            }
        }

        const TraceSample &end = samples.back();
        rep.duration = end.t;
        const Vec3 rho_T = scenario.platform.position(end.t);
        const Vec3 rho_v = scenario.platform.velocity(end.t);
        rep.terminal_position_error = (end.p - (rho_T + geo.l_bar * spec.z_d)).norm();

        const Vec3 rel_v = end.v - rho_v;
        rep.terminal_normal_speed = -rel_v.dot(spec.z_d);
        rep.terminal_tangential_speed = (rel_v - spec.z_d * spec.z_d.dot(rel_v)).norm();
        if (terminal)
        {
            rep.terminal_velocity_error = (end.v - terminal_velocity(terminal->v_t, rho_v, spec)).norm();
        }
        else
        {
            rep.terminal_velocity_error = std::abs(rep.terminal_normal_speed - spec.v_n_bar);
        }
        if (!scenario.free_terminal)
        {
            // Fixed terminal: v_t is held at zero.
            rep.terminal_velocity_error = (end.v - terminal_velocity(Vec2::Zero(), rho_v, spec)).norm();
        }

        const Vec3 tau_T = end.a + Vec3(0.0, 0.0, g_bar);
        rep.terminal_zb_angle = tau_T.norm() > 0.0
                                    ? std::acos(std::clamp(tau_T.normalized().dot(spec.z_d), -1.0, 1.0))
                                    : std::numbers::pi;
        rep.terminal_jerk = end.j.norm();

        const bool within = rep.velocity.worst <= slack && rep.bodyrate.worst <= slack &&
                            rep.thrust.worst <= slack && rep.ground.worst <= slack &&
                            rep.collision.worst <= slack;
        const bool terminal_ok = rep.terminal_position_error <= terminal_tolerance &&
                                 rep.terminal_velocity_error <= terminal_tolerance &&
                                 rep.terminal_zb_angle <= terminal_tolerance &&
                                 rep.terminal_jerk <= terminal_tolerance;
        rep.pass = within && terminal_ok;
        return rep;
    }

    ConstraintReport check(const PlanResult &plan, const Scenario &scenario, double dt, double slack,
                           double terminal_tolerance)
    {
        const double T = plan.spline.duration();
        const int count = dt > 0.0 ? std::max(1, static_cast<int>(std::ceil(T / dt))) : 2000;
        std::optional<TerminalVars> vars;
        if (scenario.free_terminal)
        {
            vars = plan.terminal;
        }
        return check_samples(sample(plan.spline, count), scenario, vars, slack, terminal_tolerance);
    }

    AuditResult gradient_audit(const Scenario &scenario, int n_probes, std::uint64_t seed,
                               bool include_zero_probe, double step)
    {
        const Eigen::VectorXd center = initial_guess(scenario).pack();
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);

        std::vector<Eigen::VectorXd> probes;
        if (include_zero_probe)
        {
            probes.push_back(Eigen::VectorXd::Zero(center.size()));
        }
        for (int k = 0; k < n_probes; ++k)
        {
            Eigen::VectorXd x = center;
            x(0) += 0.3 * unit(rng);
            for (Eigen::Index i = 1; i < x.size() - 3; ++i)
            {
                x(i) += 0.3 * unit(rng);
            }
            x(x.size() - 3) += 0.5 * unit(rng);
            x(x.size() - 2) += 0.5 * unit(rng);
            x(x.size() - 1) += 0.5 * unit(rng);
            probes.push_back(std::move(x));
        }

        AuditResult out;
        for (const Eigen::VectorXd &x : probes)
        {
            const CostEvaluation ev = cost_and_grad(x, scenario);
            Eigen::VectorXd fd(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i)
            {
                Eigen::VectorXd xp = x, xm = x;
                xp(i) += step;
                xm(i) -= step;
                fd(i) = (cost_and_grad(xp, scenario).cost - cost_and_grad(xm, scenario).cost) / (2.0 * step);
            }
            out.finite = out.finite && std::isfinite(ev.cost) && ev.grad.allFinite() && fd.allFinite();
            const double err = (ev.grad - fd).lpNorm<Eigen::Infinity>() / std::max(1.0, fd.lpNorm<Eigen::Infinity>());
            out.per_probe.push_back(err);
            out.max_relative_error = std::max(out.max_relative_error, std::isfinite(err) ? err : 1e300);
        }
        return out;
    }

    RimResult disc_oracle(const FlatState &state, const PlatformState &platform,
                          const VehicleGeometry &geometry, int n_rim)
    {
        const Vec3 tau = state.a + Vec3(0.0, 0.0, geometry.g_bar);
        const Vec3 zb = tau.normalized();
        const Vec3 center = state.p - geometry.l_bar * zb;
        const auto [e1, e2] = plane_axes(zb);

        RimResult best{-std::numeric_limits<double>::infinity(), 0.0};
        for (int k = 0; k < n_rim; ++k)
        {
            const double phi = 2.0 * std::numbers::pi * k / n_rim;
            const Vec3 x = center + geometry.r_bar * (std::cos(phi) * e1 + std::sin(phi) * e2);
            const double v = platform.a.dot(x) - platform.b;
            if (v > best.worst)
            {
                best = {v, phi};
            }
        }
        return best;
    }

    Eigen::MatrixXd dense_kkt_spline(const BoundaryState &head, const BoundaryState &tail,
                                     const Eigen::Matrix3Xd &points, double total_duration)
    {
        const int n = static_cast<int>(points.cols()) + 1;
        const double dt = total_duration / n;
        const int vars = 8 * n;
        const int cons = 8 + 5 * (n - 1);

        // Hessian of sum_i integral |p_i''''|^2 per axis.
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(vars, vars);
        for (int i = 0; i < n; ++i)
        {
            for (int m = 4; m < 8; ++m)
            {
                for (int l = 4; l < 8; ++l)
                {
                    const int e = m + l - 7;
                    h(8 * i + m, 8 * i + l) = 2.0 * factorial_ratio(m, 4) * factorial_ratio(l, 4) * std::pow(dt, e) / e;
                }
            }
        }

        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cons, vars);
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(cons, 3);
        const Eigen::Matrix<double, 3, 4> hm = head.matrix();
        const Eigen::Matrix<double, 3, 4> tm = tail.matrix();
        int row = 0;
        for (int k = 0; k < 4; ++k, ++row)
        {
            a.block(row, 0, 1, 8) = basis_row(0.0, k);
            b.row(row) = hm.col(k).transpose();
        }
        for (int k = 0; k < 4; ++k, ++row)
        {
            a.block(row, 8 * (n - 1), 1, 8) = basis_row(dt, k);
            b.row(row) = tm.col(k).transpose();
        }
        for (int i = 0; i < n - 1; ++i)
        {
            a.block(row, 8 * i, 1, 8) = basis_row(dt, 0);
            b.row(row) = points.col(i).transpose();
            ++row;
            for (int k = 0; k < 4; ++k, ++row)
            {
                a.block(row, 8 * i, 1, 8) = basis_row(dt, k);
                a.block(row, 8 * (i + 1), 1, 8) = -basis_row(0.0, k);
            }
        }

        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(vars + cons, vars + cons);
        kkt.topLeftCorner(vars, vars) = h;
        kkt.topRightCorner(vars, cons) = a.transpose();
        kkt.bottomLeftCorner(cons, vars) = a;
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(vars + cons, 3);
        rhs.bottomRows(cons) = b;

        const Eigen::MatrixXd sol = kkt.fullPivLu().solve(rhs);
        return sol.topRows(vars);
    }

} // namespace perch::validator
