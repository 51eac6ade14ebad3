#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anivar/convolution.hpp"
#include "anivar/error.hpp"
#include "anivar/fourier.hpp"
#include "anivar/grid.hpp"
#include "anivar/stencil.hpp"
#include "oracles.hpp"

using namespace anivar;
using oracle::diag2;
using oracle::mat1;
using oracle::vec;

TEST(Grid, MidpointLattice)
{
    Grid g({0.0, -1.0}, {1.0, 1.0}, {4, 8});
    EXPECT_EQ(g.size(), 32u);
    EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25 * 0.25);
    EXPECT_DOUBLE_EQ(g.coord(0, 0), 0.125);
    EXPECT_DOUBLE_EQ(g.coord(1, 7), 0.875);
    int idx[2] = {2, 5};
    std::size_t flat = g.flatten(idx);
    EXPECT_EQ(flat, 2u * 8u + 5u);  // last axis fastest
    int back[2];
    g.unflatten(flat, back);
    EXPECT_EQ(back[0], 2);
    EXPECT_EQ(back[1], 5);
    EXPECT_THROW(Grid({0.0}, {1.0}, {1}), Error);
}

TEST(Integrate, Examples)
{
    Grid box({-1.0, 0.0}, {2.0, 0.5}, {30, 10});
    EXPECT_DOUBLE_EQ(integrate(GridFunction(box, 1.0)), 1.5);
    EXPECT_EQ(integrate(GridFunction(box)), 0.0);
    Grid unit = Grid::cube(1, 0, 1, 1024);
    EXPECT_NEAR(integrate(sample(unit, [](const Vector& x) { return x[0] * x[0]; })), 1.0 / 3.0, 1e-6);
}

TEST(Integrate, LinearAndMonotone)
{
    Grid g = oracle::desk_1d(512);
    GridFunction f = oracle::random_smooth(g, 1), h = oracle::random_smooth(g, 2);
    EXPECT_NEAR(integrate(2.5 * f + h), 2.5 * integrate(f) + integrate(h), 1e-10);
    GridFunction lo = abs(f), hi = abs(f) + GridFunction(g, 0.1);
    EXPECT_LE(integrate(lo), integrate(hi));
}

TEST(IntegrateOnBall, Examples)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    const double h = g.spacing(0);
    DilatedBall b0{vec({0}), 0};
    EXPECT_NEAR(integrate_on_ball(GridFunction(g, 1.0), d, b0), 1.0, 2 * h);
    EXPECT_NEAR(integrate_on_ball(sample(g, [](const Vector& x) { return x[0]; }), d, b0), 0.0, 1e-8);
    EXPECT_NEAR(integrate_on_ball(sample(g, [](const Vector& x) { return std::abs(x[0]); }), d, b0), 0.25, 2 * h);
    EXPECT_THROW(integrate_on_ball(GridFunction(g, 1.0), d, DilatedBall{vec({100}), 0}), Error);
    try {
        integrate_on_ball(GridFunction(g, 1.0), d, DilatedBall{vec({100}), 0});
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyMask);
    }
}

TEST(IntegrateOnBall, FirstOrderConvergence)
{
    // off-lattice ellipse: the surface error shrinks with the cell size
    Dilation d(diag2(2, 3));
    DilatedBall ball{vec({0.1234, -0.0567}), 1};
    std::vector<double> err;
    for (int res : {64, 128, 256, 512}) {
        Grid g = Grid::cube(2, -2, 2, res);
        err.push_back(std::abs(integrate_on_ball(GridFunction(g, 1.0), d, ball) - 6.0));
    }
    // average rate over three doublings at least first order (individual steps fluctuate)
    EXPECT_LT(err.back(), err.front() / 4.0);
}

TEST(BallPoints, MatchesIntervalArithmetic)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d(1000);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-6, 6);
    for (int t = 0; t < 50; ++t) {
        double c = u(rng);
        int k = static_cast<int>(t % 5) - 2;
        double half = std::ldexp(0.5, k);
        EXPECT_EQ(ball_points(g, d, DilatedBall{vec({c}), k}), oracle::interval_points(g, c - half, c + half));
    }
}

TEST(BoundaryMargin, Cases)
{
    Grid g = Grid::cube(1, 0, 1, 100);
    EXPECT_EQ(integrate(boundary_margin(g, 0.0)), 1.0);
    EXPECT_EQ(integrate(boundary_margin(g, 0.6)), 0.0);
    GridFunction m = boundary_margin(g, 0.25);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.coord(0, static_cast<long>(i));
        EXPECT_EQ(m[i], (x >= 0.25 && x <= 0.75) ? 1.0 : 0.0);
    }
}

namespace {

GridFunction bump_kernel(bool odd)
{
    // (3/2)(1 - 4x^2)_+ integrates to 1 on (-1/2, 1/2)
    Grid kg = Grid::cube(1, -1, 1, 512);
    return sample(kg, [odd](const Vector& x) {
        double v = std::max(0.0, 1 - 4 * x[0] * x[0]);
        return odd ? x[0] * v : 1.5 * v;
    });
}

// Direct sum over every pair of lattice points; independent of stencils and FFTs.
GridFunction brute_convolve(const GridFunction& f, const Kernel& k, const Dilation& d, int scale)
{
    const Grid& g = f.grid();
    GridFunction out(g);
    const double bk = d.b_power(scale);
    for (std::size_t x = 0; x < g.size(); ++x) {
        double s = 0;
        for (std::size_t y = 0; y < g.size(); ++y) {
            if (f[y] == 0)
                continue;
            Vector z = d.power(scale) * (g.point(x) - g.point(y));
            s += f[y] * bk * k.eval(z);
        }
        out[x] = s * g.cell_volume();
    }
    return out;
}

}  // namespace

TEST(Convolve, ZeroAndNormalisation)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    GridFunction phi = bump_kernel(false);
    EXPECT_EQ(max_abs(convolve_scaled(GridFunction(g), phi, d, 0)), 0.0);
    for (int k : {-2, 0, 3}) {
        GridFunction c = convolve_scaled(GridFunction(g, 1.0), phi, d, k);
        GridFunction mask = boundary_margin(g, 3.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (mask[i] > 0)
                ASSERT_NEAR(c[i], 1.0, 1e-3) << "k=" << k;
        }
    }
}

TEST(Convolve, VanishingIntegralKillsConstants)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    GridFunction c = convolve_scaled(GridFunction(g, 1.0), bump_kernel(true), d, 1);
    GridFunction mask = boundary_margin(g, 2.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mask[i] > 0)
            ASSERT_NEAR(c[i], 0.0, 1e-6);
    }
}

TEST(Convolve, MatchesBruteForceSum)
{
    Dilation d(mat1(2));
    Grid g = Grid::cube(1, -4, 4, 256);
    GridFunction f = oracle::random_smooth(g, 9);
    Kernel k = Kernel::from_grid(bump_kernel(false), d);
    for (int scale : {-1, 1}) {
        GridFunction fast = convolve(f, scale_kernel(k, g, d, scale));
        GridFunction slow = brute_convolve(f, k, d, scale);
        for (std::size_t i = 0; i < g.size(); ++i)
            ASSERT_NEAR(fast[i], slow[i], 1e-12 * (1 + std::abs(slow[i])));
    }
}

TEST(Convolve, FftPathAgreesWithDirect)
{
    Dilation d(diag2(2, 3));
    Grid g = Grid::cube(2, -2, 2, 48);
    GridFunction f = oracle::random_smooth(g, 12);
    Grid kg = Grid::cube(2, -1, 1, 64);
    GridFunction phi = sample(kg, [](const Vector& x) { return std::max(0.0, 0.09 - x.squaredNorm()); });
    ScaledKernel sk = scale_kernel(Kernel::from_grid(phi, d), g, d, 0);
    GridFunction viafft = fft_convolve(f, sk.stencil, sk.weights);
    GridFunction direct = convolve(f, sk);  // small problem: direct path
    for (std::size_t i = 0; i < g.size(); ++i)
        ASSERT_NEAR(viafft[i], direct[i], 1e-10);
}

TEST(Convolve, TranslationEquivariant)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d(1024);
    GridFunction f = sample(g, [](const Vector& x) { return std::exp(-x[0] * x[0]); });
    GridFunction fs = sample(g, [&](const Vector& x) { return std::exp(-(x[0] - 20 * g.spacing(0)) * (x[0] - 20 * g.spacing(0))); });
    GridFunction phi = bump_kernel(false);
    GridFunction a = convolve_scaled(f, phi, d, 0), b = convolve_scaled(fs, phi, d, 0);
    for (std::size_t i = 100; i + 100 < g.size(); ++i)
        ASSERT_NEAR(b[i + 20], a[i], 1e-12);
}

TEST(Convolve, TooFineScaleIsReported)
{
    Dilation d(mat1(2));
    Grid g = Grid::cube(1, -1, 1, 16);
    try {
        convolve_scaled(GridFunction(g, 1.0), bump_kernel(false), d, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScaleTooFine);
    }
}

TEST(Convolve, ProjectedMomentsVanish)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d(1024);
    Kernel k = Kernel::from_grid(bump_kernel(false), d, 2);
    ScaledKernel sk = scale_kernel(k, g, d, -1);
    for (int p = 0; p <= 2; ++p) {
        double m = 0;
        for (std::size_t i = 0; i < sk.stencil.count(); ++i)
            m += sk.weights[i] * std::pow(sk.stencil.offset(i)[0], p);
        EXPECT_NEAR(m, 0.0, 1e-9);
    }
}

TEST(Spectral, RoundTripAndIdentityMultiplier)
{
    Grid g = Grid::cube(1, -4, 4, 200);
    GridFunction f = oracle::random_smooth(g, 3);
    SpectralDomain dom = SpectralDomain::padded(g, 2);
    EXPECT_GE(dom.dims()[0], 400);
    GridFunction back = dom.apply(dom.forward(f), std::vector<double>(dom.size(), 1.0));
    for (std::size_t i = 0; i < g.size(); ++i)
        ASSERT_NEAR(back[i], f[i], 1e-12);
}

TEST(Spectral, GaussianMultiplierMatchesAnalyticConvolution)
{
    // e^{-pi x^2} has transform e^{-pi xi^2}; squaring the multiplier convolves it with itself
    Grid g = Grid::cube(1, -8, 8, 1024);
    GridFunction f = sample(g, [](const Vector& x) { return std::exp(-std::numbers::pi * x[0] * x[0]); });
    SpectralDomain dom = SpectralDomain::padded(g, 2);
    std::vector<double> m(dom.size());
    double xi = 0;
    for (std::size_t i = 0; i < dom.size(); ++i) {
        dom.frequency(i, &xi);
        m[i] = std::exp(-std::numbers::pi * xi * xi);
    }
    GridFunction c = dom.apply(dom.forward(f), m);
    for (std::size_t i = 0; i < g.size(); i += 7) {
        double x = g.coord(0, static_cast<long>(i));
        ASSERT_NEAR(c[i], std::exp(-std::numbers::pi * x * x / 2) / std::sqrt(2.0), 1e-9);
    }
}
