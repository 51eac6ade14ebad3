#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anivar/dilation.hpp"
#include "anivar/error.hpp"
#include "oracles.hpp"

using namespace anivar;
using oracle::diag2;
using oracle::mat1;
using oracle::vec;

namespace {

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Dilation, OneDimensionalClosedForm)
{
    Dilation d(mat1(2));
    EXPECT_EQ(d.b(), 2.0);
    EXPECT_DOUBLE_EQ(d.r(), std::sqrt(2.0));
    // P = sum_k 2^k 4^-k = 2
    EXPECT_NEAR(d.shape()(0, 0), 2.0, 1e-13);
    // 2 sqrt(c / P) = 1
    EXPECT_NEAR(d.level_c(), 0.5, 1e-13);
    EXPECT_EQ(d.omega(), 2);
    EXPECT_TRUE(d.diagonalizable());
}

TEST(Dilation, DiagonalClosedForm)
{
    Dilation d(diag2(2, 3));
    EXPECT_NEAR(d.b(), 6.0, 1e-14);
    const double s2 = 2.0;  // s = sqrt(lambda_-) = sqrt(2)
    const double p11 = 1 / (1 - s2 / 4), p22 = 1 / (1 - s2 / 9);
    EXPECT_NEAR(d.shape()(0, 0), p11, 1e-12);
    EXPECT_NEAR(d.shape()(1, 1), p22, 1e-12);
    EXPECT_NEAR(d.shape()(0, 1), 0.0, 1e-14);
    // ellipse area pi c / sqrt(p11 p22) = 1
    EXPECT_NEAR(std::numbers::pi * d.level_c() / std::sqrt(p11 * p22), 1.0, 1e-10);
}

TEST(Dilation, InvariantsHoldForGeneralMatrix)
{
    Matrix a(2, 2);
    a << 1.5, 0.7, -0.4, 2.2;
    Dilation d(a);
    Matrix gap = a.transpose() * d.shape() * a - d.r() * d.r() * d.shape();
    Eigen::SelfAdjointEigenSolver<Matrix> es(gap);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    double area = std::numbers::pi * d.level_c() / std::sqrt(d.shape().determinant());
    EXPECT_NEAR(area, 1.0, 1e-10);
    EXPECT_GE(std::pow(d.r(), d.omega()), 2.0);
    EXPECT_LT(std::pow(d.r(), d.omega() - 1), 2.0);
    EXPECT_GT(d.lambda_minus(), 1.0);
}

TEST(Dilation, DefectiveMatrixUsesWidenedBounds)
{
    Matrix a(2, 2);
    a << 2, 1, 0, 2;
    Dilation d(a);
    EXPECT_FALSE(d.diagonalizable());
    EXPECT_NEAR(d.lambda_minus(), 2 * 0.999, 1e-9);
    EXPECT_NEAR(d.lambda_plus(), 2 * 1.001, 1e-9);
}

TEST(Dilation, RejectsNonExpansive)
{
    EXPECT_EQ(code_of([] { Dilation d(mat1(1)); }), ErrorCode::NotExpansive);
    EXPECT_EQ(code_of([] { Dilation d(diag2(2, 0.5)); }), ErrorCode::NotExpansive);
    Matrix rot(2, 2);
    rot << 0, -1, 1, 0;  // eigenvalues on the unit circle
    EXPECT_EQ(code_of([&] { Dilation d(rot); }), ErrorCode::NotExpansive);
}

TEST(Dilation, BallMembershipOnInterval)
{
    Dilation d(mat1(2));
    DilatedBall b0{vec({0}), 0};
    EXPECT_TRUE(ball_contains(d, b0, vec({0})));
    EXPECT_TRUE(ball_contains(d, b0, vec({0.49})));
    EXPECT_FALSE(ball_contains(d, b0, vec({0.51})));
    EXPECT_FALSE(ball_contains(d, b0, vec({0.5})));  // open ball
    EXPECT_TRUE(ball_contains(d, b0, vec({0.5 - 1e-12})));
    EXPECT_FALSE(ball_contains(d, b0, vec({0.5 + 1e-12})));
    EXPECT_TRUE(ball_contains(d, DilatedBall{vec({0}), 1}, vec({0.75})));
}

TEST(Dilation, VolumesAreAnalytic)
{
    Dilation d1(mat1(2));
    EXPECT_EQ(ball_volume(d1, DilatedBall{vec({0}), 0}), 1.0);
    EXPECT_EQ(ball_volume(d1, DilatedBall{vec({0}), 3}), 8.0);
    Dilation d2(diag2(2, 3));
    EXPECT_NEAR(ball_volume(d2, DilatedBall{vec({0, 0}), -1}), 1.0 / 6.0, 1e-16);
}

TEST(Dilation, StepQuasiNormExamples)
{
    Dilation d(mat1(2));
    EXPECT_EQ(step_quasi_norm(d, vec({0})), 0.0);
    EXPECT_EQ(step_quasi_norm(d, vec({0.75})), 1.0);
    EXPECT_EQ(step_quasi_norm(d, vec({1.5})), 2.0);
    EXPECT_EQ(step_quasi_norm(d, vec({1.5})), 2 * step_quasi_norm(d, vec({0.75})));
    // interval arithmetic: x in B_{k+1} \ B_k iff 2^{k-1} <= |x| < 2^k
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-8, 8);
    for (int i = 0; i < 2000; ++i) {
        double x = u(rng);
        double k = std::floor(std::log2(std::abs(x))) + 1;
        EXPECT_EQ(step_quasi_norm(d, vec({x})), std::ldexp(1.0, static_cast<int>(k))) << x;
    }
}

TEST(Dilation, ExactHomogeneityAndSymmetry)
{
    for (const Matrix& a : {mat1(2), diag2(2, 3)}) {
        Dilation d(a);
        const int n = d.dim();
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-8, 8);
        for (int i = 0; i < 10000; ++i) {
            Vector x(n);
            for (int j = 0; j < n; ++j)
                x[j] = u(rng);
            Vector ax = a * x;
            const int k = *d.level(x);
            ASSERT_EQ(*d.level(ax), k + 1);
            ASSERT_EQ(step_quasi_norm(d, x), d.b_power(k));
            ASSERT_EQ(step_quasi_norm(d, ax), d.b_power(k + 1));
            ASSERT_EQ(step_quasi_norm(d, -x), step_quasi_norm(d, x));
        }
    }
}

TEST(Dilation, BallVolumeIsExactPowerOfB)
{
    for (const Matrix& a : {mat1(2), diag2(2, 3), diag2(3, 5)}) {
        Dilation d(a);
        const long long b = std::llround(std::abs(a.determinant()));
        for (int k = -12; k <= 12; ++k) {
            long long m = 1;
            for (int j = 0; j < std::abs(k); ++j)
                m *= b;
            // one correctly rounded operation from an exact integer
            const double exact = k >= 0 ? static_cast<double>(m) : 1.0 / static_cast<double>(m);
            ASSERT_EQ(ball_volume(d, DilatedBall{Vector::Zero(d.dim()), k}), exact) << k;
        }
    }
}

TEST(Dilation, LevelOverflowIsReported)
{
    Dilation d(mat1(2));
    EXPECT_EQ(code_of([&] { (void)d.level(vec({1e300})); }), ErrorCode::ScaleOverflow);
}

TEST(Dilation, MonotoneNesting)
{
    Dilation d(diag2(2, 3));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 2000; ++i) {
        Vector x = vec({u(rng), u(rng)});
        Vector c = vec({u(rng), u(rng)});
        for (int k = -3; k < 3; ++k) {
            if (ball_contains(d, DilatedBall{c, k}, x))
                ASSERT_TRUE(ball_contains(d, DilatedBall{c, k + 1}, x));
        }
    }
}

TEST(Dilation, MonteCarloVolume)
{
    Dilation d1(mat1(2));
    EXPECT_NEAR(monte_carlo_volume(d1, 2, 1000000, 1) / 4.0, 1.0, 0.01);
    Dilation d2(diag2(2, 3));
    EXPECT_NEAR(monte_carlo_volume(d2, 1, 1000000, 2) / 6.0, 1.0, 0.01);
    Matrix a(2, 2);
    a << 1.5, 0.7, -0.4, 2.2;
    Dilation d3(a);
    EXPECT_NEAR(monte_carlo_volume(d3, 0, 1000000, 3), 1.0, 0.01);
}

TEST(Dilation, ContainmentExamples)
{
    Dilation d(mat1(2));
    DilatedBall b1{vec({0}), 1};
    EXPECT_TRUE(ball_containment(d, b1, b1));
    EXPECT_TRUE(ball_containment(d, DilatedBall{vec({0}), 0}, b1));
    EXPECT_FALSE(ball_containment(d, DilatedBall{vec({0.9}), 0}, b1));
    EXPECT_TRUE(ball_containment(d, DilatedBall{vec({0.5}), 0}, b1));  // closed: (0,1) in [-1,1]
    EXPECT_FALSE(ball_containment(d, DilatedBall{vec({0}), 2}, b1));
}

TEST(Dilation, ContainmentAgreesWithSampling)
{
    // brute force: inner contained iff sampled boundary points of the inner ellipse stay in the outer one
    Matrix a(2, 2);
    a << 1.5, 0.7, -0.4, 2.2;
    Dilation d(a);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::uniform_int_distribution<int> ks(-2, 1);
    Eigen::LLT<Matrix> llt(d.shape());
    Matrix L = llt.matrixL();
    int agree = 0, total = 0;
    for (int t = 0; t < 300; ++t) {
        DilatedBall in{vec({u(rng), u(rng)}), ks(rng)};
        DilatedBall out{vec({0, 0}), 1};
        double worst = 0;
        for (int j = 0; j < 4000; ++j) {
            double th = 2 * std::numbers::pi * j / 4000;
            // boundary of Delta: L^-T * sqrt(c) * (cos, sin)
            Vector w = L.transpose().triangularView<Eigen::Upper>().solve(
                std::sqrt(d.level_c()) * vec({std::cos(th), std::sin(th)}));
            Vector x = in.center + d.power(in.scale) * w;
            worst = std::max(worst, d.quadratic(x - out.center, out.scale) / d.level_c());
        }
        if (std::abs(worst - 1) < 1e-4)
            continue;  // too close to call by sampling
        ++total;
        agree += ball_containment(d, in, out) == (worst <= 1);
    }
    EXPECT_EQ(agree, total);
    EXPECT_GT(total, 200);
}

TEST(Dilation, QuasiTriangleEstimateIsStable)
{
    Dilation d(diag2(2, 3));
    double h1 = estimate_quasi_triangle(d, 20000, 1);
    double h2 = estimate_quasi_triangle(d, 40000, 2);
    EXPECT_GE(h1, 1.0);
    EXPECT_TRUE(std::isfinite(h1));
    EXPECT_LE(std::abs(h2 / h1 - 1), 0.25);
}
