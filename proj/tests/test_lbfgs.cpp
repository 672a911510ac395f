#include "perch/lbfgs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace perch;

namespace
{
    double rosenbrock(const Eigen::VectorXd &x, Eigen::VectorXd &g)
    {
        double f = 0.0;
        g.setZero();
        for (Eigen::Index i = 0; i + 1 < x.size(); ++i)
        {
            const double a = x(i + 1) - x(i) * x(i);
            const double b = 1.0 - x(i);
            f += 100.0 * a * a + b * b;
            g(i) += -400.0 * a * x(i) - 2.0 * b;
            g(i + 1) += 200.0 * a;
        }
        return f;
    }
} // namespace

TEST(Lbfgs, Rosenbrock)
{
    for (int n : {2, 10})
    {
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i)
        {
            x(i) = (i % 2) ? 1.0 : -1.2;
        }
        lbfgs::Params p;
        p.delta = 0.0;
        p.g_epsilon = 1e-8;
        const lbfgs::Result r = lbfgs::minimize(rosenbrock, x, p);
        EXPECT_EQ(r.status, lbfgs::Status::GradientTolerance) << lbfgs::to_string(r.status);
        EXPECT_LT((x - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff(), 1e-5);
        EXPECT_LT(r.cost, 1e-10);
    }
}

TEST(Lbfgs, HistoryNeverIncreases)
{
    Eigen::VectorXd x = Eigen::VectorXd::Constant(6, -1.5);
    const lbfgs::Result r = lbfgs::minimize(rosenbrock, x);
    ASSERT_EQ(static_cast<int>(r.history.size()), r.iterations + 1);
    for (std::size_t k = 1; k < r.history.size(); ++k)
    {
        EXPECT_LE(r.history[k], r.history[k - 1]);
    }
    Eigen::VectorXd g(6);
    EXPECT_DOUBLE_EQ(rosenbrock(x, g), r.cost);
}

TEST(Lbfgs, StopsImmediatelyAtOptimum)
{
    Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
    const lbfgs::Result r = lbfgs::minimize(rosenbrock, x);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.status, lbfgs::Status::GradientTolerance);
    EXPECT_EQ(x, Eigen::VectorXd::Ones(4));
}

TEST(Lbfgs, IterationCap)
{
    Eigen::VectorXd x = Eigen::VectorXd::Constant(10, -1.0);
    lbfgs::Params p;
    p.max_iterations = 3;
    p.delta = 0.0;
    const lbfgs::Result r = lbfgs::minimize(rosenbrock, x, p);
    EXPECT_EQ(r.status, lbfgs::Status::MaxIterations);
    EXPECT_EQ(r.iterations, 3);
}

TEST(Lbfgs, QuadraticIsSolvedExactly)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(5, 5);
    A = A * A.transpose() + 5.0 * Eigen::MatrixXd::Identity(5, 5);
    const Eigen::VectorXd b = Eigen::VectorXd::Random(5);
    auto f = [&](const Eigen::VectorXd &x, Eigen::VectorXd &g) {
        g = A * x - b;
        return 0.5 * x.dot(A * x) - b.dot(x);
    };
    Eigen::VectorXd x = Eigen::VectorXd::Zero(5);
    lbfgs::Params p;
    p.g_epsilon = 1e-10;
    p.delta = 0.0;
    lbfgs::minimize(f, x, p);
    EXPECT_LT((A * x - b).norm(), 1e-8);
}

TEST(Lbfgs, InfiniteCostIsBacktracked)
{
    // The barrier region x > 2 is reported as infinite; the minimum sits at the edge of it.
    auto f = [](const Eigen::VectorXd &x, Eigen::VectorXd &g) {
        if (x(0) > 2.0)
        {
            g.setZero();
            return std::numeric_limits<double>::infinity();
        }
        g(0) = 2.0 * (x(0) - 1.9);
        return (x(0) - 1.9) * (x(0) - 1.9);
    };
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, -10.0);
    const lbfgs::Result r = lbfgs::minimize(f, x);
    EXPECT_TRUE(std::isfinite(r.cost));
    EXPECT_NEAR(x(0), 1.9, 1e-4);
}
