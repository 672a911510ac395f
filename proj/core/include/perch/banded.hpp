#pragma once

#include <Eigen/Dense>

#include <vector>

namespace perch
{
    /// Square banded matrix with in-place LU (no pivoting) and primal/adjoint solves.
    /// Storage is dense over the band only, so factorization and solves are O(n (p + q)^2).
    class BandedSystem
    {
    public:
        BandedSystem() = default;
        BandedSystem(int n, int lower, int upper);

        int size() const { return n_; }

        double &operator()(int i, int j) { return data_[index(i, j)]; }
        double operator()(int i, int j) const { return data_[index(i, j)]; }

        /// Throws std::runtime_error on a vanishing pivot.
        void factorize();

        /// Overwrites b with A^{-1} b. Requires factorize().
        void solve(Eigen::MatrixXd &b) const;

        /// Overwrites b with A^{-T} b. Requires factorize().
        void solve_adjoint(Eigen::MatrixXd &b) const;

        /// Dense copy of the stored matrix (or of its LU factors after factorize()).
        Eigen::MatrixXd dense() const;

    private:
        int index(int i, int j) const { return (i - j + upper_) * n_ + j; }

        int n_ = 0;
        int lower_ = 0;
        int upper_ = 0;
        std::vector<double> data_;
    };

} // namespace perch
