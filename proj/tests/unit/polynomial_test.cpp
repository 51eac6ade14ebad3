#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "anivar/error.hpp"
#include "anivar/polynomial.hpp"
#include "oracles.hpp"

using namespace anivar;
using oracle::diag2;
using oracle::mat1;
using oracle::vec;

namespace {

// L^2(B) inner product by plain lattice sum.
double ball_inner(const GridFunction& f, const std::function<double(const Vector&)>& h, const BallSamples& bs)
{
    double s = 0;
    for (std::size_t p : bs.points)
        s += f[p] * h(f.grid().point(p));
    return s * bs.cell_volume;
}

double ball_l2(const GridFunction& f, const std::function<double(const Vector&)>& h, const BallSamples& bs)
{
    double s = 0;
    for (std::size_t p : bs.points) {
        double r = f[p] - h(f.grid().point(p));
        s += r * r;
    }
    return std::sqrt(s * bs.cell_volume);
}

Matrix general2()
{
    Matrix m(2, 2);
    m << 2, 1, 0, 3;
    return m;
}

}  // namespace

TEST(MultiIndex, CountAndOrder)
{
    for (int n = 1; n <= 3; ++n)
        for (int s = 0; s <= 4; ++s) {
            auto idx = multi_indices(n, s);
            EXPECT_EQ(idx.size(), polynomial_dimension(n, s));
            // C(n+s, s)
            double c = 1;
            for (int j = 1; j <= s; ++j)
                c = c * (n + j) / j;
            EXPECT_EQ(static_cast<double>(idx.size()), c);
            int prev = 0;
            for (const auto& g : idx) {
                int deg = 0;
                for (int v : g)
                    deg += v;
                EXPECT_GE(deg, prev);
                prev = deg;
            }
        }
    EXPECT_EQ(monomial(vec({2, 3}), MultiIndex{2, 1}), 12.0);
}

TEST(Polynomial, Evaluate)
{
    Dilation d(mat1(2));
    Vector c1(1);
    c1 << 2.5;
    EXPECT_EQ(evaluate(Polynomial::in_ball(d, DilatedBall{vec({1}), 3}, 0, c1), vec({-7})), 2.5);
    Vector lin(2);
    lin << 0, 1;
    EXPECT_EQ(evaluate(Polynomial::in_ball(d, DilatedBall{vec({0.25}), 0}, 1, lin), vec({0.25})), 0.0);
    // u = A^-k (x - c)
    EXPECT_DOUBLE_EQ(evaluate(Polynomial::in_ball(d, DilatedBall{vec({1}), 2}, 1, lin), vec({3})), 0.5);
}

TEST(MinimizingPolynomial, Examples)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    DilatedBall b1{vec({0}), 1};
    Polynomial p = minimizing_polynomial(sample(g, [](const Vector& x) { return x[0] * x[0]; }), d, b1, 1);
    const double h = g.spacing(0);
    EXPECT_NEAR(p.coefficients()[0], 1.0 / 3.0, h * h);
    EXPECT_NEAR(p.coefficients()[1], 0.0, 1e-12);
    EXPECT_NEAR(evaluate(p, vec({0.5})), 1.0 / 3.0, h * h);

    GridFunction affine = sample(g, [](const Vector& x) { return 3 * x[0] + 1; });
    Polynomial q = minimizing_polynomial(affine, d, b1, 1);
    for (double x : {-0.9, 0.0, 0.4, 5.0})
        EXPECT_NEAR(evaluate(q, vec({x})), 3 * x + 1, 1e-10);

    Polynomial m = minimizing_polynomial(sample(g, [](const Vector& x) { return std::abs(x[0]); }), d, b1, 0);
    EXPECT_NEAR(m.coefficients()[0], 0.5, 1e-12);
}

TEST(MinimizingPolynomial, InsufficientSamples)
{
    Dilation d(mat1(2));
    Grid g = Grid::cube(1, -1, 1, 8);
    try {
        minimizing_polynomial(GridFunction(g, 1.0), d, DilatedBall{vec({0.125}), -2}, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
    }
}

TEST(MinimizingPolynomial, OrthogonalIdempotentOptimal)
{
    Dilation d(general2());
    Grid g = Grid::cube(2, -3, 3, 96);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int s = 0; s <= 3; ++s) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            GridFunction f = oracle::random_smooth(g, seed);
            DilatedBall ball{vec({0.3 * u(rng), 0.3 * u(rng)}), 0};
            BallSamples bs = ball_samples(g, d, ball, s);
            Polynomial p = minimizing_polynomial(f, d, bs);
            auto pf = [&](const Vector& x) { return p.evaluate(x); };
            GridFunction resid = f - sample(g, pf);
            double fnorm = ball_l2(f, [](const Vector&) { return 0.0; }, bs);
            for (const auto& gamma : bs.ball.scale == 0 ? multi_indices(2, s) : multi_indices(2, s)) {
                auto hb = [&](const Vector& x) { return monomial(p.local(x), gamma); };
                double hn = ball_l2(GridFunction(g), [&](const Vector& x) { return -hb(x); }, bs);
                EXPECT_LE(std::abs(ball_inner(resid, hb, bs)), 1e-8 * fnorm * hn);
            }
            // idempotent
            Polynomial again = minimizing_polynomial(sample(g, pf), d, bs);
            EXPECT_LE((again.coefficients() - p.coefficients()).cwiseAbs().maxCoeff(), 1e-10);
            // optimal against random competitors
            double best = ball_l2(f, pf, bs);
            for (int t = 0; t < 50; ++t) {
                Vector c = p.coefficients();
                for (Eigen::Index j = 0; j < c.size(); ++j)
                    c[j] += 0.1 * u(rng);
                Polynomial qq = Polynomial::in_ball(d, ball, s, c);
                EXPECT_LE(best, ball_l2(f, [&](const Vector& x) { return qq.evaluate(x); }, bs) + 1e-14);
            }
        }
    }
}

TEST(MinimizingPolynomial, ReproducesDegreeS)
{
    Dilation d(diag2(2, 3));
    Grid g = Grid::cube(2, -2, 2, 80);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int s = 0; s <= 3; ++s) {
        DilatedBall ball{vec({0.1, -0.2}), 0};
        Vector c(static_cast<Eigen::Index>(polynomial_dimension(2, s)));
        for (Eigen::Index j = 0; j < c.size(); ++j)
            c[j] = u(rng);
        Polynomial truth = Polynomial::in_ball(d, DilatedBall{vec({0.5, 0.5}), 1}, s, c);
        GridFunction f = sample(g, [&](const Vector& x) { return truth.evaluate(x); });
        Polynomial p = minimizing_polynomial(f, d, ball, s);
        for (std::size_t i : ball_points(g, d, ball))
            ASSERT_NEAR(p.evaluate(g.point(i)), f[i], 1e-10);
    }
}

TEST(RefineLq, NeverWorseThanProjection)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d(1024);
    GridFunction f = sample(g, [](const Vector& x) { return std::abs(x[0]) + (x[0] > 0.3 ? 1.0 : 0.0); });
    BallSamples bs = ball_samples(g, d, DilatedBall{vec({0}), 1}, 1);
    for (double q : {1.0, 1.5, 4.0}) {
        LqFit fit = refine_lq(f, d, bs, q);
        EXPECT_LE(fit.refined_error, fit.projection_error);
        EXPECT_NEAR(fit.projection_error, lq_error(f, bs, fit.projection.coefficients(), q), 1e-12);
        EXPECT_NEAR(fit.refined_error, lq_error(f, bs, fit.refined.coefficients(), q), 1e-12);
    }
    LqFit two = refine_lq(f, d, bs, 2.0);
    EXPECT_NEAR(two.refined_error, two.projection_error, 1e-12 * two.projection_error);
}

TEST(Moments, Examples)
{
    Grid unit = Grid::cube(1, 0, 1, 1000);
    auto m = moments(GridFunction(unit, 1.0), 1);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_NEAR(m[0], 1.0, 1e-12);
    EXPECT_NEAR(m[1], 0.5, 1e-12);

    Dilation d(diag2(2, 3));
    Grid g = Grid::cube(2, -2, 2, 64);
    GridFunction odd = sample(g, [](const Vector& x) { return x[0] * std::exp(-x.squaredNorm()); });
    auto mo = moments(odd, d, DilatedBall{vec({0, 0}), 0}, 2);
    auto idx = multi_indices(2, 2);
    for (std::size_t j = 0; j < idx.size(); ++j) {
        if ((idx[j][0] + 1) % 2 == 1)  // integrand odd in x
            EXPECT_NEAR(mo[j], 0.0, 1e-8);
    }
}
