#pragma once

namespace perch
{
    struct SmoothingParams
    {
        double mu = 1e-2;  // width of the exact-penalty smoother
        double eps = 1e-2; // half-width of the logistic gate, m^2
    };

    struct Smoothed
    {
        double value = 0.0;
        double derivative = 0.0;
    };

    /// C2 smoothing of max(x, 0): cubic blend on (0, mu], linear x - mu/2 beyond.
    Smoothed l_mu(double x, double mu);

    /// C1 step from 0 to 1 over [-eps, eps], passing through 1/2 at the origin.
    Smoothed l_eps(double x, double eps);

} // namespace perch
