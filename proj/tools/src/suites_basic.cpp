#include <algorithm>
#include <cmath>

#include "anivar/convolution.hpp"
#include "anivar/exponent.hpp"
#include "anivar/experiments/checks.hpp"
#include "anivar/experiments/generators.hpp"
#include "anivar/polynomial.hpp"

namespace anivar::experiments {

namespace {

int grid_2d_side(const SuiteOptions& opt)
{
    return std::max(16, opt.resolution / 16);
}

Matrix skew_matrix()
{
    Matrix a(2, 2);
    a << 1.5, 0.7, -0.4, 2.2;
    return a;
}

// Plain L^q quadrature, kept apart from the Luxemburg solver.
double lq_quadrature(const GridFunction& f, double q)
{
    long double s = 0;
    for (double v : f.values())
        s += std::pow(static_cast<long double>(std::abs(v)), static_cast<long double>(q));
    return static_cast<double>(std::pow(s * f.grid().cell_volume(), 1.0L / q));
}

double rel(double a, double b)
{
    double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

SuiteReport geometry_suite(const SuiteOptions& opt)
{
    SuiteReport rep{"geometry", {}};
    struct Case {
        std::string label;
        Matrix a;
        int mc_scale;
    };
    const std::vector<Case> cases{{"[2]", matrix_1d(2), 2}, {"diag(2,3)", matrix_diag(2, 3), 1}};

    for (const Case& c : cases) {
        Dilation d(c.a);
        const int n = d.dim();
        Rng rng = stream(opt.seed, 11);
        std::normal_distribution<double> z;
        std::uniform_real_distribution<double> e(-3, 3);
        double homog = 0, sym = 0;
        for (int i = 0; i < 10000; ++i) {
            Vector x(n);
            for (int a = 0; a < n; ++a)
                x[a] = z(rng);
            x *= std::pow(10.0, e(rng)) / x.norm();
            // rho = b^level, so rho(Ax) = b rho(x) holds exactly iff the level goes up by one;
            // comparing b * b^k against b^(k+1) in floating point would test the rounding of pow
            auto k0 = d.level(x), k1 = d.level(c.a * x);
            if (!k0 || !k1 || *k1 != *k0 + 1 || step_quasi_norm(d, c.a * x) != d.b_power(*k0 + 1))
                ++homog;
            if (step_quasi_norm(d, -x) != step_quasi_norm(d, x))
                ++sym;
        }
        rep.checks.push_back(make_check("homogeneity " + c.label, homog, 0, {{"points", 10000}}));
        rep.checks.push_back(make_check("symmetry " + c.label, sym, 0, {{"points", 10000}}));

        // |det A| from the diagonal, independent of the dilation's own table
        double det = 1;
        for (int a = 0; a < n; ++a)
            det *= std::abs(c.a(a, a));
        double worst = 0;
        for (int k = -6; k <= 6; ++k) {
            Vector zero = Vector::Zero(n);
            double exact = 1;
            for (int j = 0; j < std::abs(k); ++j)
                exact *= det;
            if (k < 0)
                exact = 1 / exact;
            worst = std::max(worst, rel(ball_volume(d, DilatedBall{zero, k}), exact));
        }
        rep.checks.push_back(make_check("analytic volume " + c.label, worst, 0));

        double mc = monte_carlo_volume(d, c.mc_scale, 1000000, opt.seed + 3);
        double expect = std::pow(det, c.mc_scale);
        rep.checks.push_back(make_check("monte carlo volume " + c.label, std::abs(mc / expect - 1), 0.01,
                                        {{"estimate", mc}, {"exact", expect}, {"samples", 1000000}}));
    }

    {
        Dilation d(skew_matrix());
        double mc = monte_carlo_volume(d, 0, 1000000, opt.seed + 5);
        rep.checks.push_back(make_check("monte carlo volume [[1.5,0.7],[-0.4,2.2]]", std::abs(mc - 1), 0.01,
                                        {{"estimate", mc}}));
        Rng rng = stream(opt.seed, 12);
        std::uniform_real_distribution<double> u(-2, 2);
        double bad = 0;
        for (int i = 0; i < 2000; ++i) {
            Vector x(2), ctr(2);
            x << u(rng), u(rng);
            ctr << u(rng), u(rng);
            for (int k = -3; k < 3; ++k)
                if (ball_contains(d, DilatedBall{ctr, k}, x) && !ball_contains(d, DilatedBall{ctr, k + 1}, x))
                    ++bad;
        }
        rep.checks.push_back(make_check("monotone nesting", bad, 0));
    }

    {
        Dilation d(matrix_diag(2, 3));
        double h1 = estimate_quasi_triangle(d, 20000, opt.seed + 1);
        double h2 = estimate_quasi_triangle(d, 40000, opt.seed + 2);
        double r = std::isfinite(h1) && h1 >= 1 ? std::abs(h2 / h1 - 1) : INFINITY;
        rep.checks.push_back(make_check("quasi-triangle stable under doubling", r, 0.25, {{"H", h1}, {"H_doubled", h2}}));
    }

    {
        Grid g = desk_grid_1d(opt.resolution);
        GridFunction f = random_smooth(g, opt.seed + 21), h = random_smooth(g, opt.seed + 22);
        double lin = std::abs(integrate(2.0 * f + 3.0 * h) - (2 * integrate(f) + 3 * integrate(h)));
        GridFunction h2 = h;
        for (double& v : h2.values())
            v = v * v;
        double mono = std::max(0.0, integrate(f) - integrate(f + h2));
        rep.checks.push_back(make_check("integrate linear and monotone", lin + mono, 1e-10));
    }

    {
        Dilation d(matrix_diag(2, 3));
        Vector ctr(2);
        ctr << 0.1234, -0.0567;
        DilatedBall ball{ctr, 1};
        std::vector<double> err;
        for (int res : {64, 128, 256, 512}) {
            Grid g = Grid::cube(2, -2, 2, res);
            err.push_back(std::abs(integrate_on_ball(GridFunction(g, 1.0), d, ball) - 6.0));
        }
        // three doublings, at least first order on average
        rep.checks.push_back(make_check("ball integral converges", err.back() / (err.front() / 8.0), 2.0,
                                        {{"errors", err}}));
    }

    {
        Dilation d(matrix_1d(2));
        Grid g = desk_grid_1d(1024);
        const double sh = 20 * g.spacing(0);
        GridFunction f = sample(g, [](const Vector& x) { return std::exp(-x[0] * x[0]); });
        GridFunction fs = sample(g, [&](const Vector& x) { return std::exp(-(x[0] - sh) * (x[0] - sh)); });
        GridFunction phi = sample(Grid::cube(1, -1, 1, 512),
                                  [](const Vector& x) { return 1.5 * std::max(0.0, 1 - 4 * x[0] * x[0]); });
        GridFunction a = convolve_scaled(f, phi, d, 0), b = convolve_scaled(fs, phi, d, 0);
        double worst = 0;
        for (std::size_t i = 100; i + 100 < g.size(); ++i)
            worst = std::max(worst, std::abs(b[i + 20] - a[i]));
        rep.checks.push_back(make_check("convolution translation equivariant", worst, 1e-12));
    }
    return rep;
}

SuiteReport exponent_suite(const SuiteOptions& opt)
{
    SuiteReport rep{"exponent", {}};
    Grid g = desk_grid_1d(opt.resolution);

    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        GridFunction f = random_smooth(g, opt.seed * 131 + 1000 + i);
        for (double q : {1.0, 1.5, 2.0, 4.0})
            worst = std::max(worst, rel(luxemburg_norm(f, Exponent::constant(g, q)), lq_quadrature(f, q)));
    }
    rep.checks.push_back(make_check("constant exponent oracle", worst, 1e-8, {{"functions", 20}}));

    {
        Grid unit = Grid::cube(1, 0, 1, opt.resolution);
        Exponent p(sample(unit, [](const Vector& x) { return x[0] < 0.5 ? 1.0 : 2.0; }), 2.0);
        double v = luxemburg_norm(GridFunction(unit, 2.0), p);
        rep.checks.push_back(make_check("piecewise closed form", std::abs(v - 2) / 2, 1e-8, {{"norm", v}}));
    }

    Exponent pv(sample(g, [](const Vector& x) { return 0.6 + 0.8 * std::pow(std::sin(x[0]), 2); }), 1.0);
    double homog = 0, mono = 0, unit_gap = 0, bracket = 0;
    for (int i = 0; i < 10; ++i) {
        GridFunction f = random_smooth(g, opt.seed * 131 + 2000 + i);
        GridFunction h = random_smooth(g, opt.seed * 131 + 3000 + i);
        double nf = luxemburg_norm(f, pv);
        for (double c : {0.3, 7.0})
            homog = std::max(homog, rel(luxemburg_norm(c * f, pv), c * nf));
        GridFunction big = abs(f) + abs(h);
        if (luxemburg_norm(big, pv) < nf * (1 - 1e-12))
            ++mono;
        LuxemburgResult r = luxemburg_solve(f, pv);
        GridFunction scaled = (1.0 / r.norm) * f;
        double m = modular(scaled, pv);
        unit_gap = std::max({unit_gap, m - 1, (1 - 1e-6) - m});
        bracket = std::max(bracket, (r.upper - r.lower) / r.norm);
    }
    rep.checks.push_back(make_check("homogeneity", homog, 1e-8));
    rep.checks.push_back(make_check("monotone in |f|", mono, 0));
    rep.checks.push_back(make_check("unit modular at the norm", std::max(0.0, unit_gap), 1e-12));
    rep.checks.push_back(make_check("bisection bracket", bracket, 1e-12));

    {
        Dilation d(matrix_1d(2));
        LogHolderReport c = check_log_holder(Exponent::constant(g, 1.5), d, 20000, opt.seed + 1);
        rep.checks.push_back(make_check("log-Hoelder constant exponent", c.c_log + c.c_inf, 0));
        Exponent smooth(sample(g, [](const Vector& x) { return 2 + std::pow(std::sin(x[0]), 2) / 4; }), 2.125);
        LogHolderReport s = check_log_holder(smooth, d, 20000, opt.seed + 2);
        rep.checks.push_back(make_check("log-Hoelder smooth exponent stable", s.stable_under_doubling ? 0 : 1, 0,
                                        {{"c_log", s.c_log}, {"c_inf", s.c_inf}}));
        Exponent jump(sample(g, [](const Vector& x) { return x[0] < 0.1 ? 1.2 : 2.0; }), 2.0);
        LogHolderReport j = check_log_holder(jump, d, 20000, opt.seed + 3);
        rep.checks.push_back(make_check("log-Hoelder jump flagged", j.unbounded_growth ? 0 : 1, 0,
                                        {{"nested_growth", j.nested_growth}}));
    }
    return rep;
}

SuiteReport projection_suite(const SuiteOptions& opt)
{
    SuiteReport rep{"projection", {}};
    Grid g1 = desk_grid_1d(opt.resolution);
    Grid g2 = desk_grid_2d(grid_2d_side(opt));
    Dilation d1(matrix_1d(2)), d2(matrix_diag(2, 3));
    Rng rng = stream(opt.seed, 31);
    std::uniform_real_distribution<double> u(-1, 1);

    double ortho = 0, idem = 0, reprod = 0, optimal_bad = 0;
    for (int i = 0; i < 20; ++i) {
        const bool two = i % 2 == 1;
        const Grid& g = two ? g2 : g1;
        const Dilation& d = two ? d2 : d1;
        const int s = i % 4;
        DilatedBall ball = two ? random_ball(g, d, -1, 0, rng) : random_ball(g, d, -2, 1, rng);
        GridFunction f = random_smooth(g, opt.seed * 977 + i);
        BallSamples bs = ball_samples(g, d, ball, s);
        Polynomial P = minimizing_polynomial(f, d, bs);
        const std::size_t np = bs.points.size(), nb = static_cast<std::size_t>(bs.basis.cols());

        std::vector<double> resid(np);
        double fnorm = 0;
        for (std::size_t r = 0; r < np; ++r) {
            Vector x = g.point(bs.points[r]);
            resid[r] = f[bs.points[r]] - P.evaluate(x);
            fnorm += f[bs.points[r]] * f[bs.points[r]];
        }
        fnorm = std::sqrt(fnorm * g.cell_volume());
        for (std::size_t j = 0; j < nb; ++j) {
            double dot = 0, hn = 0;
            for (std::size_t r = 0; r < np; ++r) {
                dot += resid[r] * bs.basis(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
                hn += std::pow(bs.basis(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)), 2);
            }
            dot *= g.cell_volume();
            hn = std::sqrt(hn * g.cell_volume());
            ortho = std::max(ortho, std::abs(dot) / (fnorm * hn));
        }

        // project the projection again
        GridFunction pf(g);
        for (std::size_t r = 0; r < np; ++r)
            pf[bs.points[r]] = P.evaluate(g.point(bs.points[r]));
        Polynomial PP = minimizing_polynomial(pf, d, bs);
        idem = std::max(idem, (PP.coefficients() - P.coefficients()).norm() / std::max(1.0, P.coefficients().norm()));

        GridFunction poly = random_polynomial(g, s, rng);
        Polynomial Q = minimizing_polynomial(poly, d, bs);
        double pmax = 0, diff = 0;
        for (std::size_t r = 0; r < np; ++r) {
            Vector x = g.point(bs.points[r]);
            pmax = std::max(pmax, std::abs(poly[bs.points[r]]));
            diff = std::max(diff, std::abs(Q.evaluate(x) - poly[bs.points[r]]));
        }
        reprod = std::max(reprod, diff / std::max(1.0, pmax));

        double best = 0;
        for (double v : resid)
            best += v * v;
        for (int t = 0; t < 50; ++t) {
            Vector c = P.coefficients();
            double amp = std::pow(10.0, -3 + 3 * std::abs(u(rng)));
            for (Eigen::Index j = 0; j < c.size(); ++j)
                c[j] += amp * u(rng);
            double other = 0;
            for (std::size_t r = 0; r < np; ++r) {
                double e = f[bs.points[r]] - bs.basis.row(static_cast<Eigen::Index>(r)).dot(c);
                other += e * e;
            }
            if (best > other * (1 + 1e-12))
                ++optimal_bad;
        }
    }
    rep.checks.push_back(make_check("orthogonality", ortho, 1e-8, {{"cases", 20}}));
    rep.checks.push_back(make_check("idempotence", idem, 1e-10));
    rep.checks.push_back(make_check("degree <= s reproduction", reprod, 1e-10));
    rep.checks.push_back(make_check("optimality against random competitors", optimal_bad, 0, {{"competitors", 50}}));
    return rep;
}

}  // namespace anivar::experiments
