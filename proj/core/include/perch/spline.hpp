#pragma once

#include "perch/banded.hpp"
#include "perch/types.hpp"

#include <Eigen/Dense>

#include <utility>

namespace perch
{
    /// Polynomial degree of each piece (2s - 1 with s = 4).
    inline constexpr int kDegree = 7;
    inline constexpr int kCoeffs = kDegree + 1;

    /// Derivative order integrated by the control-effort cost. 4 is minimum snap; the
    /// construction in PerchSpline::build is only energy-optimal for 4.
    inline constexpr int kEnergyOrder = 4;

    /// Row vector of d^order/dt^order (1, t, ..., t^7).
    Eigen::Matrix<double, 1, kCoeffs> monomial_basis(double t, int order);

    /// Rows 0..4 are monomial_basis(t, 0..4).
    Eigen::Matrix<double, 5, kCoeffs> derivative_basis(double t);

    /// Minimum-snap spline with fixed position-through-jerk boundary states, N equal-duration
    /// pieces and N - 1 interior waypoints. Coefficients are stored 8N x 3: rows 8i..8i+7 hold
    /// the t^0..t^7 coefficients of piece i in local time.
    class PerchSpline
    {
    public:
        struct Energy
        {
            double cost = 0.0;         // integral of |p^(k)|^2 over the whole spline
            Eigen::MatrixXd d_coeffs;  // 8N x 3
            Eigen::VectorXd d_times;   // per piece, coefficients held fixed
        };

        struct Gradients
        {
            Eigen::Matrix3Xd d_points;          // 3 x (N - 1)
            Eigen::VectorXd d_piece_durations;  // N, including the implicit coefficient response
            double d_total_duration = 0.0;      // sum(d_piece_durations) / N
            Eigen::Matrix<double, 3, 4> d_head; // columns p, v, a, j
            Eigen::Matrix<double, 3, 4> d_tail;
        };

        PerchSpline() = default;

        /// Throws std::invalid_argument for fewer than two pieces, non-positive duration or
        /// non-finite input.
        static PerchSpline build(const BoundaryState &head, const BoundaryState &tail,
                                 const Eigen::Matrix3Xd &points, double total_duration);

        int pieces() const { return pieces_; }
        double duration() const { return duration_; }
        double piece_duration() const { return duration_ / pieces_; }
        const Eigen::MatrixXd &coefficients() const { return coeffs_; }
        const Eigen::Matrix3Xd &points() const { return points_; }
        const BoundaryState &head() const { return head_; }
        const BoundaryState &tail() const { return tail_; }

        /// Piece index and local time for a global time in [0, duration].
        std::pair<int, double> locate(double t) const;

        /// Derivatives above max_order are left zero. Throws std::out_of_range outside [0, T].
        FlatState eval(double t, int max_order = 4) const;
        FlatState eval_piece(int piece, double local_t, int max_order = 4) const;

        /// order-th derivative of one piece at local time.
        Vec3 derivative(int piece, double local_t, int order) const;

        Energy energy() const;

        /// Chain-rules partial gradients of F(c, T_i) through the linear construction map.
        Gradients propagate(const Eigen::MatrixXd &d_coeffs, const Eigen::VectorXd &d_times) const;

    private:
        int pieces_ = 0;
        double duration_ = 0.0;
        BoundaryState head_;
        BoundaryState tail_;
        Eigen::Matrix3Xd points_;
        Eigen::MatrixXd coeffs_;
        BandedSystem system_; // LU factors
    };

} // namespace perch
