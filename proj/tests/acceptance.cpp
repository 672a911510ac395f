// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include "perch/flatness.hpp"
#include "perch/optimizer.hpp"
#include "perch/penalties.hpp"
#include "perch/smoothing.hpp"
#include "perch/spline.hpp"
#include "perch/validator.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace perch;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    std::string fmt(const char *f, auto... args)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    double median(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

    bool ok(const PlanResult &plan, const Scenario &s)
    {
        return plan.status == SolveStatus::Converged && validator::check(plan, s).pass;
    }

    Outcome gradient_audit()
    {
        const Scenario s = test::load("benchmark-rest2rest");
        const auto t0 = std::chrono::steady_clock::now();
        const validator::AuditResult r = validator::gradient_audit(s, 12);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return {r.finite && r.max_relative_error <= 1e-4 && r.per_probe.size() >= 10 && secs < 10.0,
                fmt("%zu probes, max rel err %.2e, %.2f s", r.per_probe.size(), r.max_relative_error, secs)};
    }

    Outcome spline_vs_kkt()
    {
        test::Rng rng(2024);
        double worst_coeff = 0.0, worst_residual = 0.0;
        for (int trial = 0; trial < 20; ++trial)
        {
            const int N = 2 + trial % 3;
            const BoundaryState head = test::random_boundary(rng);
            const BoundaryState tail = test::random_boundary(rng);
            Eigen::Matrix3Xd q(3, N - 1);
            for (int i = 0; i < N - 1; ++i)
            {
                q.col(i) = rng.vec(-2, 2);
            }
            const double T = rng.uniform(0.5, 4.0);
            const PerchSpline s = PerchSpline::build(head, tail, q, T);
            const Eigen::MatrixXd oracle = test::kkt_min_snap(head, tail, q, T);
            const Eigen::MatrixXd &c = s.coefficients();
            for (Eigen::Index k = 0; k < c.size(); ++k)
            {
                worst_coeff = std::max(worst_coeff, std::abs(c(k) - oracle(k)) / std::max(1.0, std::abs(oracle(k))));
            }
            const FlatState a = s.eval(0.0, 3), b = s.eval(T, 3);
            worst_residual = std::max({worst_residual, (a.p - head.p).norm(), (a.v - head.v).norm(),
                                       (a.a - head.a).norm(), (a.j - head.j).norm(), (b.p - tail.p).norm(),
                                       (b.v - tail.v).norm(), (b.a - tail.a).norm(), (b.j - tail.j).norm()});
            for (int i = 1; i < N; ++i)
            {
                worst_residual = std::max(worst_residual, (s.eval(T * i / N, 0).p - q.col(i - 1)).norm());
            }
        }
        return {worst_coeff <= 1e-8 && worst_residual <= 1e-9,
                fmt("20 instances, coeff err %.2e, residual %.2e", worst_coeff, worst_residual)};
    }

    Outcome disc_support()
    {
        test::Rng rng(99);
        VehicleGeometry geo;
        int agree = 0;
        double gap = 0.0;
        for (int k = 0; k < 1000; ++k)
        {
            FlatState x;
            x.p = rng.vec(-0.3, 0.3);
            x.a = rng.vec(-8, 8);
            PlatformModel m;
            m.spec.z_d = rng.unit();
            m.rho0 = rng.vec(-0.2, 0.2);
            const PlatformState ps = m.at(0.0);
            const double margin = support_margin(x, ps, geo).value;
            const Vec3 zb = flatness::zb_from_thrust(flatness::net_thrust(x.a, geo.g_bar));
            const double rim = test::rim_worst(x.p - geo.l_bar * zb, zb, geo.r_bar, ps.a, ps.b, 3600);
            agree += (margin > 0.0) == (rim > 0.0);
            gap = std::max(gap, std::abs(margin - rim));
        }
        return {agree == 1000 && gap <= 1e-3, fmt("sign agreement %d/1000, max gap %.2e", agree, gap)};
    }

    Outcome benchmark_solve()
    {
        const Scenario s = test::load("benchmark-rest2rest");
        std::vector<double> ms;
        bool all_ok = true;
        for (int k = 0; k < 5; ++k)
        {
            const PlanResult plan = solve(s);
            all_ok = all_ok && ok(plan, s);
            ms.push_back(plan.wall_time_ms);
        }
        const double med = median(ms);
        return {all_ok && med < 100.0, fmt("converged+valid %s, cold median %.1f ms", all_ok ? "yes" : "no", med)};
    }

    Outcome slopes()
    {
        const Scenario base = test::load("benchmark-rest2rest");
        bool all_ok = true;
        std::string detail;
        for (double slope : {-70.0, -90.0, -110.0})
        {
            Scenario s = base;
            s.platform.spec.z_d = surface_normal_from_slope(slope);
            const PlanResult plan = solve(s);
            const bool good = ok(plan, s);
            all_ok = all_ok && good;
            detail += fmt("%g deg %s (%d it) ", slope, good ? "ok" : "FAIL", plan.iterations);
        }
        return {all_ok, detail};
    }

    Outcome height_sweep()
    {
        const Scenario base = test::load("height-sweep");
        bool all_ok = true;
        bool monotone = true;
        double prev = -1.0, min_alt = 1e9;
        std::string detail;
        for (double h = 2.0; h >= 1.0 - 1e-9; h -= 0.25)
        {
            Scenario s = base;
            s.platform.rho0.z() = h;
            const PlanResult plan = solve(s);
            const validator::ConstraintReport rep = validator::check(plan, s);
            all_ok = all_ok && plan.status == SolveStatus::Converged;
            const double vt = plan.terminal.v_t.norm();
            monotone = monotone && vt >= prev - 1e-3;
            prev = vt;
            min_alt = std::min(min_alt, rep.min_altitude);
            detail += fmt("%.2f:%.3f ", h, vt);
        }
        const bool alt_ok = min_alt >= base.limits.z_min - 0.05;
        return {all_ok && monotone && alt_ok, detail + fmt("min alt %.3f", min_alt)};
    }

    Outcome warm_start()
    {
        const Scenario s = test::load("moving-vehicle");
        std::vector<double> cold_ms, warm_ms;
        int cold_it = 0, warm_it = 0;
        bool valid = true;
        for (int k = 0; k < 5; ++k)
        {
            const PlanResult first = solve(s);
            const Scenario next = advance(s, first, 0.1);
            const PlanResult cold = solve(next);
            const PlanResult warm = replan(next, first, 0.1);
            cold_ms.push_back(cold.wall_time_ms);
            warm_ms.push_back(warm.wall_time_ms);
            cold_it = cold.iterations;
            warm_it = warm.iterations;
            valid = valid && ok(warm, next);
        }
        const double c = median(cold_ms), w = median(warm_ms);
        return {w <= 0.5 * c && warm_it < cold_it && valid,
                fmt("cold %.1f ms (%d it), warm %.1f ms (%d it), ratio %.2f, valid %s", c, cold_it, w, warm_it,
                    w / c, valid ? "yes" : "no")};
    }

    Outcome moving_terminal()
    {
        const Scenario s = test::load("moving-vehicle");
        const PlanResult plan = solve(s);
        const validator::ConstraintReport rep = validator::check(plan, s);
        const double deg = rep.terminal_zb_angle * 180.0 / std::numbers::pi;
        const bool good = plan.status == SolveStatus::Converged && std::abs(rep.terminal_normal_speed - 0.3) <= 0.02 &&
                          rep.min_altitude >= 0.35 && deg <= 1.0;
        return {good, fmt("normal speed %.4f, min alt %.3f, z_b angle %.2e deg", rep.terminal_normal_speed,
                          rep.min_altitude, deg)};
    }

    Outcome smoothing()
    {
        double worst = 0.0;
        auto mu_ref = [](double x, double mu) {
            return x <= 0 ? 0.0 : x <= mu ? (mu - x / 2) * std::pow(x / mu, 3) : x - mu / 2;
        };
        auto eps_ref = [](double x, double e) {
            if (x <= -e) return 0.0;
            if (x <= 0) return std::pow(x + e, 3) * (e - x) / (2 * std::pow(e, 4));
            if (x <= e) return std::pow(x - e, 3) * (e + x) / (2 * std::pow(e, 4)) + 1.0;
            return 1.0;
        };
        for (double w : {1e-3, 1e-2, 1e-1})
        {
            const double h = 1e-7 * w;
            for (int k = -300; k <= 300; ++k)
            {
                const double x = w * k / 97.0;
                worst = std::max(worst, std::abs(l_mu(x, w).value - mu_ref(x, w)));
                worst = std::max(worst, std::abs(l_eps(x, w).value - eps_ref(x, w)));
                const double fd_mu = (mu_ref(x + h, w) - mu_ref(x - h, w)) / (2 * h);
                const double fd_eps = (eps_ref(x + h, w) - eps_ref(x - h, w)) / (2 * h);
                worst = std::max(worst, std::abs(l_mu(x, w).derivative - fd_mu) / std::max(1.0, std::abs(fd_mu)));
                worst = std::max(worst, std::abs(l_eps(x, w).derivative - fd_eps) / std::max(1.0, std::abs(fd_eps)));
                worst = std::max(worst, std::abs(1.0 - l_eps(x, w).value - l_eps(-x, w).value));
            }

            // Knot continuity: values and first derivatives of both kernels, plus the scaled
            // second derivative of l_mu, which vanishes on both sides of its knots.
            const double d = 1e-9 * w;
            for (double knot : {-w, 0.0, w})
            {
                worst = std::max(worst, std::abs(l_eps(knot - d, w).value - l_eps(knot + d, w).value));
                worst = std::max(worst, w * std::abs(l_eps(knot - d, w).derivative - l_eps(knot + d, w).derivative));
                worst = std::max(worst, std::abs(l_mu(knot - d, w).value - l_mu(knot + d, w).value) / w);
                worst = std::max(worst, std::abs(l_mu(knot - d, w).derivative - l_mu(knot + d, w).derivative));
            }
            for (double knot : {0.0, w})
            {
                // Normalized by the blend's peak curvature 1.5 / w.
                const double hh = 1e-7 * w;
                const double second = (l_mu(knot + hh, w).derivative - l_mu(knot - hh, w).derivative) / (2 * hh);
                worst = std::max(worst, std::abs(second) * w / 1.5);
            }

            // Monotone, with l_eps bounded in [0, 1].
            double prev_mu = 0.0, prev_eps = 0.0;
            for (int k = -3000; k <= 3000; ++k)
            {
                const double x = w * k / 1000.0;
                const Smoothed m = l_mu(x, w), e = l_eps(x, w);
                if (m.value < prev_mu - 1e-15 || e.value < prev_eps - 1e-15 || m.derivative < 0.0 ||
                    e.derivative < 0.0 || e.value < 0.0 || e.value > 1.0 || m.value < 0.0)
                {
                    worst = std::max(worst, 1.0);
                }
                prev_mu = m.value;
                prev_eps = e.value;
            }
        }
        return {worst <= 1e-6, fmt("max deviation %.2e", worst)};
    }
} // namespace

int main()
{
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"gradient audit", gradient_audit},
        {"spline matches dense KKT", spline_vs_kkt},
        {"disc support vs rim sampling", disc_support},
        {"benchmark cold solve", benchmark_solve},
        {"slopes -70/-90/-110", slopes},
        {"landing height sweep", height_sweep},
        {"warm start speedup", warm_start},
        {"moving vehicle terminal", moving_terminal},
        {"smoothing kernels", smoothing},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k)
    {
        Outcome o;
        try
        {
            o = criteria[k].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
