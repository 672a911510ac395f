#include "perch/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace perch
{
    namespace
    {
        double falling_factorial(int m, int k)
        {
            double r = 1.0;
            for (int i = 0; i < k; ++i)
            {
                r *= m - i;
            }
            return r;
        }

        // Derivative order of each constraint row that involves the end of piece i
        // (rows 8i+4 .. 8i+11 for interior pieces): snap, crackle, pop, waypoint,
        // position continuity, velocity, acceleration, jerk.
        constexpr int kInteriorRowOrder[8] = {4, 5, 6, 0, 0, 1, 2, 3};
    } // namespace

    Eigen::Matrix<double, 1, kCoeffs> monomial_basis(double t, int order)
    {
        Eigen::Matrix<double, 1, kCoeffs> row = Eigen::Matrix<double, 1, kCoeffs>::Zero();
        double power = 1.0;
        for (int m = order; m < kCoeffs; ++m)
        {
            row(m) = falling_factorial(m, order) * power;
            power *= t;
        }
        return row;
    }

    Eigen::Matrix<double, 5, kCoeffs> derivative_basis(double t)
    {
        double powers[kCoeffs];
        powers[0] = 1.0;
        for (int m = 1; m < kCoeffs; ++m)
        {
            powers[m] = powers[m - 1] * t;
        }
        Eigen::Matrix<double, 5, kCoeffs> rows = Eigen::Matrix<double, 5, kCoeffs>::Zero();
        for (int k = 0; k < 5; ++k)
        {
            for (int m = k; m < kCoeffs; ++m)
            {
                rows(k, m) = falling_factorial(m, k) * powers[m - k];
            }
        }
        return rows;
    }

    PerchSpline PerchSpline::build(const BoundaryState &head, const BoundaryState &tail,
                                   const Eigen::Matrix3Xd &points, double total_duration)
    {
        const int n = static_cast<int>(points.cols()) + 1;
        if (n < 2)
        {
            throw std::invalid_argument("spline needs at least two pieces");
        }
        if (!(total_duration > 0.0) || !std::isfinite(total_duration))
        {
            throw std::invalid_argument("spline duration must be positive and finite");
        }
        if (!head.finite() || !tail.finite() || !points.allFinite())
        {
            throw std::invalid_argument("spline boundary data must be finite");
        }

        PerchSpline s;
        s.pieces_ = n;
        s.duration_ = total_duration;
        s.head_ = head;
        s.tail_ = tail;
        s.points_ = points;

        const double dt = total_duration / n;
        const int dim = kCoeffs * n;
        BandedSystem a(dim, kCoeffs, kCoeffs);
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, 3);

        const auto put = [&a](int row, int piece, const Eigen::Matrix<double, 1, kCoeffs> &basis, double sign) {
            for (int m = 0; m < kCoeffs; ++m)
            {
                if (basis(m) != 0.0)
                {
                    a(row, kCoeffs * piece + m) += sign * basis(m);
                }
            }
        };

        const Eigen::Matrix<double, 3, 4> hm = head.matrix();
        const Eigen::Matrix<double, 3, 4> tm = tail.matrix();
        for (int d = 0; d < 4; ++d)
        {
            put(d, 0, monomial_basis(0.0, d), 1.0);
            b.row(d) = hm.col(d).transpose();
        }
        for (int i = 0; i < n - 1; ++i)
        {
            const int base = kCoeffs * i + 4;
            for (int r = 0; r < 8; ++r)
            {
                const int order = kInteriorRowOrder[r];
                put(base + r, i, monomial_basis(dt, order), 1.0);
                if (r != 3)
                {
                    put(base + r, i + 1, monomial_basis(0.0, order), -1.0);
                }
            }
            b.row(base + 3) = points.col(i).transpose();
        }
        for (int d = 0; d < 4; ++d)
        {
            put(dim - 4 + d, n - 1, monomial_basis(dt, d), 1.0);
            b.row(dim - 4 + d) = tm.col(d).transpose();
        }

        a.factorize();
        a.solve(b);
        s.coeffs_ = std::move(b);
        s.system_ = std::move(a);
        return s;
    }

    std::pair<int, double> PerchSpline::locate(double t) const
    {
        const double slack = 1e-12 * std::max(1.0, duration_);
        if (!(t >= -slack && t <= duration_ + slack))
        {
            throw std::out_of_range("spline evaluated outside [0, T]");
        }
        t = std::clamp(t, 0.0, duration_);
        const double dt = piece_duration();
        int i = static_cast<int>(std::floor(t / dt));
        i = std::clamp(i, 0, pieces_ - 1);
        return {i, t - i * dt};
    }

    Vec3 PerchSpline::derivative(int piece, double local_t, int order) const
    {
        return (monomial_basis(local_t, order) * coeffs_.middleRows<kCoeffs>(kCoeffs * piece)).transpose();
    }

    FlatState PerchSpline::eval_piece(int piece, double local_t, int max_order) const
    {
        FlatState out;
        Vec3 *slots[5] = {&out.p, &out.v, &out.a, &out.j, &out.s};
        const int top = std::clamp(max_order, 0, 4);
        for (int k = 0; k <= top; ++k)
        {
            *slots[k] = derivative(piece, local_t, k);
        }
        return out;
    }

    FlatState PerchSpline::eval(double t, int max_order) const
    {
        const auto [piece, local_t] = locate(t);
        return eval_piece(piece, local_t, max_order);
    }

    PerchSpline::Energy PerchSpline::energy() const
    {
        constexpr int k = kEnergyOrder;
        const double dt = piece_duration();

        // Gram matrix of the k-th derivatives of the monomials over [0, dt].
        Eigen::Matrix<double, kCoeffs, kCoeffs> gram = Eigen::Matrix<double, kCoeffs, kCoeffs>::Zero();
        for (int m = k; m < kCoeffs; ++m)
        {
            for (int l = k; l < kCoeffs; ++l)
            {
                const int e = m + l - 2 * k + 1;
                gram(m, l) = falling_factorial(m, k) * falling_factorial(l, k) * std::pow(dt, e) / e;
            }
        }

        Energy out;
        out.d_coeffs = Eigen::MatrixXd::Zero(coeffs_.rows(), 3);
        out.d_times = Eigen::VectorXd::Zero(pieces_);
        for (int i = 0; i < pieces_; ++i)
        {
            const auto c = coeffs_.middleRows<kCoeffs>(kCoeffs * i);
            const Eigen::Matrix<double, kCoeffs, 3> gc = gram * c;
            out.cost += (c.transpose() * gc).trace();
            out.d_coeffs.middleRows<kCoeffs>(kCoeffs * i) = 2.0 * gc;
            out.d_times(i) = derivative(i, dt, k).squaredNorm();
        }
        return out;
    }

    PerchSpline::Gradients PerchSpline::propagate(const Eigen::MatrixXd &d_coeffs,
                                                  const Eigen::VectorXd &d_times) const
    {
        const int n = pieces_;
        const int dim = kCoeffs * n;
        const double dt = piece_duration();

        Eigen::MatrixXd adj = d_coeffs;
        system_.solve_adjoint(adj);

        Gradients g;
        g.d_points.resize(3, n - 1);
        for (int i = 0; i < n - 1; ++i)
        {
            g.d_points.col(i) = adj.row(kCoeffs * i + 7).transpose();
        }
        for (int d = 0; d < 4; ++d)
        {
            g.d_head.col(d) = adj.row(d).transpose();
            g.d_tail.col(d) = adj.row(dim - 4 + d).transpose();
        }

        // dJ/dT_i = dF/dT_i - adj^T (dA/dT_i) c; each affected row evaluates piece i at its
        // end, so its time derivative is the next derivative of that piece.
        g.d_piece_durations = d_times;
        for (int i = 0; i < n - 1; ++i)
        {
            const int base = kCoeffs * i + 4;
            for (int r = 0; r < 8; ++r)
            {
                g.d_piece_durations(i) -= adj.row(base + r).dot(derivative(i, dt, kInteriorRowOrder[r] + 1).transpose());
            }
        }
        for (int d = 0; d < 4; ++d)
        {
            g.d_piece_durations(n - 1) -= adj.row(dim - 4 + d).dot(derivative(n - 1, dt, d + 1).transpose());
        }
        g.d_total_duration = g.d_piece_durations.sum() / n;
        return g;
    }

} // namespace perch
