#include "perch/smoothing.hpp"

namespace perch
{
    Smoothed l_mu(double x, double mu)
    {
        if (x <= 0.0)
        {
            return {};
        }
        if (x <= mu)
        {
            const double r = x / mu;
            return {(mu - 0.5 * x) * r * r * r, r * r * (3.0 - 2.0 * r)};
        }
        return {x - 0.5 * mu, 1.0};
    }

    Smoothed l_eps(double x, double eps)
    {
        if (x <= -eps)
        {
            return {0.0, 0.0};
        }
        if (x > eps)
        {
            return {1.0, 0.0};
        }
        const double e4 = eps * eps * eps * eps;
        if (x <= 0.0)
        {
            const double u = x + eps;
            return {0.5 * u * u * u * (eps - x) / e4, u * u * (eps - 2.0 * x) / e4};
        }
        const double u = x - eps;
        return {0.5 * u * u * u * (eps + x) / e4 + 1.0, u * u * (eps + 2.0 * x) / e4};
    }

} // namespace perch
