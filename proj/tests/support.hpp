#pragma once

#include "perch/scenario.hpp"
#include "perch/scenario_io.hpp"
#include "perch/types.hpp"

#include <Eigen/Dense>

#include <functional>
#include <random>
#include <string>

namespace perch::test
{
    inline std::string scenario_path(const std::string &name)
    {
        return std::string(PERCH_SCENARIO_DIR) + "/" + name + ".yaml";
    }

    inline Scenario load(const std::string &name) { return load_scenario(scenario_path(name)); }

    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}

        double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

        Vec3 vec(double lo, double hi) { return Vec3(uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)); }

        Vec3 unit()
        {
            std::normal_distribution<double> n;
            Vec3 v(n(engine_), n(engine_), n(engine_));
            return v.normalized();
        }

        std::mt19937_64 &engine() { return engine_; }

    private:
        std::mt19937_64 engine_;
    };

    /// Central difference gradient of a scalar function of a 3-vector.
    inline Vec3 fd_gradient(const std::function<double(const Vec3 &)> &f, const Vec3 &x, double h = 1e-6)
    {
        Vec3 g;
        for (int k = 0; k < 3; ++k)
        {
            Vec3 xp = x, xm = x;
            xp(k) += h;
            xm(k) -= h;
            g(k) = (f(xp) - f(xm)) / (2.0 * h);
        }
        return g;
    }

    /// Central difference Jacobian of a vector function of a 3-vector.
    inline Mat3 fd_jacobian(const std::function<Vec3(const Vec3 &)> &f, const Vec3 &x, double h = 1e-6)
    {
        Mat3 J;
        for (int k = 0; k < 3; ++k)
        {
            Vec3 xp = x, xm = x;
            xp(k) += h;
            xm(k) -= h;
            J.col(k) = (f(xp) - f(xm)) / (2.0 * h);
        }
        return J;
    }

    inline double rel_error(const Eigen::MatrixXd &got, const Eigen::MatrixXd &want)
    {
        return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
    }

    inline BoundaryState random_boundary(Rng &rng, double scale = 1.0)
    {
        return BoundaryState{rng.vec(-scale, scale), rng.vec(-scale, scale), rng.vec(-scale, scale),
                             rng.vec(-scale, scale)};
    }

} // namespace perch::test
