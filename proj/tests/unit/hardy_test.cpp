#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "anivar/convolution.hpp"
#include "anivar/error.hpp"
#include "anivar/hardy.hpp"
#include "oracles.hpp"

using namespace anivar;
using oracle::diag2;
using oracle::mat1;
using oracle::vec;

namespace {

GridFunction bump(double lo = -1, double hi = 1)
{
    Grid kg = Grid::cube(1, lo, hi, 512);
    return sample(kg, [](const Vector& x) { return 1.5 * std::max(0.0, 1 - 4 * x[0] * x[0]); });
}

GridFunction identity(const Grid& g)
{
    return sample(g, [](const Vector& x) { return x[0]; });
}

Atom sqrt12_atom(const Grid& g, const Dilation& d)
{
    return make_atom(identity(g), d, DilatedBall{vec({0}), 0}, 2, Exponent::constant(g, 1), 0);
}

CampanatoParams chain_params(const Exponent& p, double q, int s)
{
    CampanatoParams prm;
    prm.p = p;
    prm.q = q;
    prm.s = s;
    return prm;
}

FiniteAtomicRep random_rep(const Grid& g, const Dilation& d, const Exponent& p, double q, int s, std::uint64_t seed,
                           int terms)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-4, 4), w(0.1, 2);
    std::uniform_int_distribution<int> k(-2, 1);
    FiniteAtomicRep rep;
    for (int t = 0; t < terms; ++t) {
        GridFunction eta = oracle::random_smooth(g, rng());
        rep.terms.emplace_back(w(rng), make_atom(eta, d, DilatedBall{vec({u(rng)}), k(rng)}, q, p, s));
    }
    return rep;
}

}  // namespace

TEST(MakeAtom, Sqrt12Example)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    Atom a = sqrt12_atom(g, d);
    EXPECT_TRUE(a.validation.valid());
    EXPECT_NEAR(a.validation.size, 1.0, 1e-12);
    EXPECT_NEAR(a.validation.size_bound, 1.0, 1e-12);
    const double h = g.spacing(0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.coord(0, static_cast<long>(i));
        if (std::abs(x) < 0.5)
            ASSERT_NEAR(a.values[i], std::sqrt(12.0) * x, 4 * h * h);
        else
            ASSERT_EQ(a.values[i], 0.0);
    }
}

TEST(MakeAtom, DegenerateSeed)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d(512);
    try {
        make_atom(GridFunction(g, 3.0), d, DilatedBall{vec({1}), 0}, 2, Exponent::constant(g, 1), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateSeed);
    }
    try {
        make_atom(identity(g), d, DilatedBall{vec({1}), 0}, 2, Exponent::constant(g, 1), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateSeed);
    }
}

TEST(MakeAtom, RandomAtomsAreValidWithVanishingMoments)
{
    Dilation d(diag2(2, 3));
    Grid g = Grid::cube(2, -3, 3, 96);
    Exponent p(sample(g, [](const Vector& x) { return 0.7 + 0.2 * std::sin(x[0] + x[1]); }), 0.7);
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(-1, 1), cu(-10, 10);
    for (int t = 0; t < 12; ++t) {
        int s = t % 3;
        double q = t % 2 ? 2.0 : 1.5;
        DilatedBall ball{vec({u(rng), u(rng)}), static_cast<int>(t % 2)};
        Atom a = make_atom(oracle::random_smooth(g, 100 + t), d, ball, q, p, s);
        ASSERT_TRUE(a.validation.valid()) << t;
        // size bound attained
        EXPECT_NEAR(a.validation.size, a.validation.size_bound, 1e-10 * a.validation.size_bound);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!ball_contains(d, ball, g.point(i)))
                ASSERT_EQ(a.values[i], 0.0);
        // moments in global coordinates by direct summation
        for (const auto& gamma : multi_indices(2, s)) {
            double m = 0, scale = 0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                double mono = monomial(g.point(i) - ball.center, gamma);
                m += a.values[i] * mono;
                scale += std::abs(a.values[i] * mono);
            }
            EXPECT_LE(std::abs(m), 1e-10 * scale);
        }
        // pairing against polynomials with coefficients in [-10, 10]
        auto idx = multi_indices(2, s);
        std::vector<double> c(idx.size());
        for (auto& v : c)
            v = cu(rng);
        GridFunction poly = sample(g, [&](const Vector& x) {
            double v = 0;
            for (std::size_t j = 0; j < idx.size(); ++j)
                v += c[j] * monomial(x, idx[j]);
            return v;
        });
        EXPECT_LE(std::abs(dual_pairing(a.values, poly)), 1e-8);
    }
}

TEST(ValidateAtom, DetectsViolations)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d(1024);
    Atom a = sqrt12_atom(g, d);
    Exponent p1 = Exponent::constant(g, 1);
    Atom leak = a;
    leak.values[g.size() - 1] = 1e-3;
    EXPECT_FALSE(validate_atom(leak, d, p1).support_ok);
    Atom big = a;
    big.values *= 1.01;
    EXPECT_FALSE(validate_atom(big, d, p1).size_ok);
    Atom shifted = a;
    for (std::size_t i : ball_points(g, d, a.ball))
        shifted.values[i] += 0.1;
    shifted.values *= 0.5;
    EXPECT_FALSE(validate_atom(shifted, d, p1).moments_ok);
    EXPECT_TRUE(validate_atom(a, d, p1).valid());
}

TEST(FiniteAtomicNorm, Examples)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    Exponent p1 = Exponent::constant(g, 1);
    Atom a = sqrt12_atom(g, d);
    FiniteAtomicRep one{{{2.5, a}}};
    EXPECT_EQ(finite_atomic_norm(one, d, p1), 2.5);
    Atom b = make_atom(identity(g), d, DilatedBall{vec({3}), 0}, 2, p1, 0);
    FiniteAtomicRep two{{{0.4, a}, {0.4, b}}};
    EXPECT_NEAR(finite_atomic_norm(two, d, p1), 0.8, 1e-12);
    FiniteAtomicRep zeros{{{0.0, a}, {1.7, b}}};
    EXPECT_EQ(finite_atomic_norm(zeros, d, p1), 1.7);
    // represented function is the weighted sum
    GridFunction f = two.function();
    for (std::size_t i = 0; i < g.size(); ++i)
        ASSERT_DOUBLE_EQ(f[i], 0.4 * a.values[i] + 0.4 * b.values[i]);
}

TEST(RadialMaximal, Examples)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    GridFunction phi = bump();
    int kmax = finest_resolvable_scale(g, d, Kernel::from_grid(phi, d).support_level);
    EXPECT_NO_THROW(scale_kernel(Kernel::from_grid(phi, d), g, d, kmax));
    EXPECT_THROW(scale_kernel(Kernel::from_grid(phi, d), g, d, kmax + 1), Error);

    EXPECT_EQ(max_abs(radial_maximal(GridFunction(g), phi, d, -3, kmax)), 0.0);

    GridFunction f = sample(g, [](const Vector& x) { return std::exp(-x[0] * x[0]) + 0.2; });
    GridFunction m = radial_maximal(f, phi, d, -2, kmax, 1.0);
    GridFunction inner = boundary_margin(g, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (inner[i] > 0)
            ASSERT_GE(m[i], (1 - 1e-2) * f[i]);
        else
            ASSERT_EQ(m[i], 0.0);
    }

    GridFunction ind = ball_indicator(g, d, DilatedBall{vec({0}), 0});
    GridFunction mi = radial_maximal(ind, phi, d, -4, kmax);
    EXPECT_GE(mi[g.size() / 2], 0.99);
}

TEST(HardyNorm, MonotoneInWindowAndZero)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d(2048);
    GridFunction phi = bump();
    Exponent p(sample(g, [](const Vector& x) { return 0.8 + 0.1 * std::cos(x[0]); }), 0.8);
    Atom a = make_atom(identity(g), d, DilatedBall{vec({0.3}), 0}, 2, p, 0);
    EXPECT_EQ(hardy_norm_estimate(GridFunction(g), phi, p, d, -2, 2), 0.0);
    double prev = 0;
    for (int lo = 0; lo >= -6; lo -= 2) {
        double v = hardy_norm_estimate(a.values, phi, p, d, lo, 4);
        EXPECT_GE(v, prev);
        EXPECT_TRUE(std::isfinite(v));
        prev = v;
    }
}

TEST(HardyNorm, AtomicRatioIsStableAcrossAFamily)
{
    // single atoms at several scales and centres: ||M a|| / ||a||_atomic should not drift
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    GridFunction phi = bump();
    Exponent p1 = Exponent::constant(g, 1);
    int kmax = finest_resolvable_scale(g, d, Kernel::from_grid(phi, d).support_level);
    std::vector<double> ratios;
    for (int k : {-2, -1, 0, 1}) {
        for (double c : {-1.3, 0.0, 2.1}) {
            Atom a = make_atom(identity(g), d, DilatedBall{vec({c}), k}, 2, p1, 0);
            FiniteAtomicRep rep{{{1.0, a}}};
            ratios.push_back(hardy_norm_estimate(rep.function(), phi, p1, d, -10, kmax) /
                             finite_atomic_norm(rep, d, p1));
        }
    }
    double mean = 0;
    for (double r : ratios)
        mean += r / static_cast<double>(ratios.size());
    for (double r : ratios) {
        EXPECT_GT(r, 0.75 * mean);
        EXPECT_LT(r, 1.25 * mean);
    }
}

TEST(DualPairing, Examples)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    GridFunction odd = identity(g), even = sample(g, [](const Vector& x) { return std::cos(x[0]); });
    EXPECT_NEAR(dual_pairing(odd, even), 0.0, 1e-12);
    Atom a = sqrt12_atom(g, d);
    EXPECT_NEAR(dual_pairing(a.values, a.values), 1.0, 1e-12);
    GridFunction f = oracle::random_smooth(g, 1), h = oracle::random_smooth(g, 2);
    EXPECT_NEAR(dual_pairing(2.0 * f + h, even), 2 * dual_pairing(f, even) + dual_pairing(h, even), 1e-10);
    EXPECT_NEAR(dual_pairing(f, h), dual_pairing(h, f), 1e-12);
}

TEST(DualityChain, Sqrt12AtomIsSharp)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    Atom a = sqrt12_atom(g, d);
    FiniteAtomicRep rep{{{1.0, a}}};
    DualityChainReport r = duality_chain_check(rep, a.values, d, chain_params(Exponent::constant(g, 1), 2, 0));
    EXPECT_TRUE(r.holds());
    EXPECT_NEAR(r.pairing, 1.0, 1e-12);
    EXPECT_NEAR(r.triangle_sum, 1.0, 1e-12);
    EXPECT_NEAR(r.holder_sum, 1.0, 1e-12);
    EXPECT_NEAR(r.bound, 1.0, 1e-12);
    EXPECT_NEAR(r.ratio, 1.0, 1e-12);
}

TEST(DualityChain, PolynomialsPairToZero)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d(2048);
    Exponent p = Exponent::constant(g, 0.9);
    for (int s = 0; s <= 2; ++s) {
        FiniteAtomicRep rep = random_rep(g, d, p, 2, s, 3 + s, 4);
        GridFunction poly = sample(g, [s](const Vector& x) { return s == 0 ? -2.0 : 1 + x[0] * (s == 2 ? x[0] : 3.0); });
        DualityChainReport r = duality_chain_check(rep, poly, d, chain_params(p, 2, s));
        EXPECT_LT(r.pairing, 1e-10);
        EXPECT_TRUE(r.holds());
    }
}

TEST(DualityChain, RandomCasesHold)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d(2048);
    Exponent p(sample(g, [](const Vector& x) { return 0.85 + 0.1 * std::sin(2 * x[0]); }), 0.85);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        double q = seed % 2 ? 1.5 : 2.0;
        int s = static_cast<int>(seed % 3);
        FiniteAtomicRep rep = random_rep(g, d, p, q, s, 50 + seed, 3 + static_cast<int>(seed));
        GridFunction gf = oracle::random_smooth(g, 900 + seed);
        DualityChainReport r = duality_chain_check(rep, gf, d, chain_params(p, q, s));
        EXPECT_TRUE(r.holds()) << seed << " " << r.slack_vanishing << " " << r.slack_holder << " "
                               << r.slack_aggregation;
        EXPECT_LE(r.pairing, r.triangle_sum * (1 + 1e-12) + 1e-14);
        EXPECT_LE(r.ratio, 1 + 1e-8);
        ASSERT_EQ(r.steps.size(), rep.terms.size());
        for (const auto& st : r.steps)
            EXPECT_LE(st.holder_lhs, st.holder_rhs * (1 + 1e-8));
    }
}

TEST(DualityChain, ExponentMismatchRejected)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d(512);
    FiniteAtomicRep rep = random_rep(g, d, Exponent::constant(g, 1), 2, 0, 1, 2);
    EXPECT_THROW(duality_chain_check(rep, identity(g), d, chain_params(Exponent::constant(g, 1), 1.5, 0)), Error);
}

TEST(DilationInequality, Examples)
{
    Dilation d(mat1(2));
    Grid g = oracle::desk_1d();
    Exponent p1 = Exponent::constant(g, 1);
    auto single = dilation_indicator_inequality(BallConfiguration::single(DilatedBall{vec({0}), -2}), d, p1, 4, 0.5);
    ASSERT_EQ(single.values.size(), 5u);
    for (int k = 0; k <= 4; ++k)
        EXPECT_NEAR(single.values[k], std::ldexp(1.0, k - 2), 1e-12);
    EXPECT_NEAR(single.slope, 1.0, 1e-9);
    EXPECT_TRUE(single.holds);
    EXPECT_FALSE(single.truncated);

    BallConfiguration c{{{DilatedBall{vec({-2}), -1}, 1}, {DilatedBall{vec({-1.8}), -2}, 1}, {DilatedBall{vec({1.5}), 0}, 1}}};
    auto rep = dilation_indicator_inequality(c, d, p1, 3, 0.5);
    for (int k = 0; k <= 3; ++k) {
        double sum = std::ldexp(1.0, -1 + k) + std::ldexp(1.0, -2 + k) + std::ldexp(1.0, k);
        EXPECT_LE(rep.values[k], sum * (1 + 1e-12));
    }
    EXPECT_LE(rep.slope, 1.0 + 1e-9);
    EXPECT_TRUE(rep.holds);
    EXPECT_THROW(dilation_indicator_inequality(c, d, p1, 3, 1.0), Error);
}
