#include "perch/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace perch
{
    BandedSystem::BandedSystem(int n, int lower, int upper)
        : n_(n), lower_(lower), upper_(upper),
          data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(lower + upper + 1), 0.0)
    {
    }

    void BandedSystem::factorize()
    {
        for (int k = 0; k < n_; ++k)
        {
            const double pivot = (*this)(k, k);
            if (!(std::abs(pivot) > 1e-300) || !std::isfinite(pivot))
            {
                throw std::runtime_error("banded system is singular");
            }
            const int i_max = std::min(k + lower_, n_ - 1);
            const int j_max = std::min(k + upper_, n_ - 1);
            for (int i = k + 1; i <= i_max; ++i)
            {
                (*this)(i, k) /= pivot;
            }
            for (int j = k + 1; j <= j_max; ++j)
            {
                const double ukj = (*this)(k, j);
                if (ukj == 0.0)
                {
                    continue;
                }
                for (int i = k + 1; i <= i_max; ++i)
                {
                    const double lik = (*this)(i, k);
                    if (lik != 0.0)
                    {
                        (*this)(i, j) -= lik * ukj;
                    }
                }
            }
        }
    }

    void BandedSystem::solve(Eigen::MatrixXd &b) const
    {
        for (int j = 0; j < n_; ++j)
        {
            const int i_max = std::min(j + lower_, n_ - 1);
            for (int i = j + 1; i <= i_max; ++i)
            {
                const double lij = (*this)(i, j);
                if (lij != 0.0)
                {
                    b.row(i) -= lij * b.row(j);
                }
            }
        }
        for (int j = n_ - 1; j >= 0; --j)
        {
            b.row(j) /= (*this)(j, j);
            const int i_min = std::max(0, j - upper_);
            for (int i = i_min; i < j; ++i)
            {
                const double uij = (*this)(i, j);
                if (uij != 0.0)
                {
                    b.row(i) -= uij * b.row(j);
                }
            }
        }
    }

    void BandedSystem::solve_adjoint(Eigen::MatrixXd &b) const
    {
        for (int j = 0; j < n_; ++j)
        {
            b.row(j) /= (*this)(j, j);
            const int i_max = std::min(j + upper_, n_ - 1);
            for (int i = j + 1; i <= i_max; ++i)
            {
                const double uji = (*this)(j, i);
                if (uji != 0.0)
                {
                    b.row(i) -= uji * b.row(j);
                }
            }
        }
        for (int j = n_ - 1; j >= 0; --j)
        {
            const int i_min = std::max(0, j - lower_);
            for (int i = i_min; i < j; ++i)
            {
                const double lji = (*this)(j, i);
                if (lji != 0.0)
                {
                    b.row(i) -= lji * b.row(j);
                }
            }
        }
    }

    Eigen::MatrixXd BandedSystem::dense() const
    {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
        for (int i = 0; i < n_; ++i)
        {
            for (int j = std::max(0, i - lower_); j <= std::min(n_ - 1, i + upper_); ++j)
            {
                m(i, j) = (*this)(i, j);
            }
        }
        return m;
    }

} // namespace perch
