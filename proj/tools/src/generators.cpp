#include "anivar/experiments/generators.hpp"

#include <cmath>

#include "anivar/error.hpp"

namespace anivar::experiments {

Rng stream(std::uint64_t seed, std::uint64_t salt)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return Rng(seq);
}

Grid desk_grid_1d(int resolution)
{
    return Grid::cube(1, -8, 8, resolution);
}

Grid desk_grid_2d(int resolution)
{
    return Grid::cube(2, -4, 4, resolution);
}

Matrix matrix_1d(double a)
{
    Matrix m(1, 1);
    m << a;
    return m;
}

Matrix matrix_diag(double a, double b)
{
    Matrix m(2, 2);
    m << a, 0, 0, b;
    return m;
}

GridFunction random_smooth(const Grid& grid, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    const int n = grid.dim();
    std::vector<Vector> c;
    std::vector<double> amp, width;
    for (int t = 0; t < 4; ++t) {
        Vector ct(n);
        for (int a = 0; a < n; ++a)
            ct[a] = 3 * u(rng);
        c.push_back(ct);
        amp.push_back(2 * u(rng));
        width.push_back(0.3 + std::abs(u(rng)));
    }
    const double lin = u(rng);
    return sample(grid, [&](const Vector& x) {
        double v = lin * x[0] + 0.5 * std::sin(3 * x.sum());
        for (std::size_t t = 0; t < c.size(); ++t)
            v += amp[t] * std::exp(-(x - c[t]).squaredNorm() / width[t]);
        return v;
    });
}

GridFunction random_polynomial(const Grid& grid, int s, Rng& rng, double range)
{
    std::uniform_real_distribution<double> u(-range, range);
    auto idx = multi_indices(grid.dim(), s);
    std::vector<double> coeffs(idx.size());
    for (double& c : coeffs)
        c = u(rng);
    return sample(grid, [&](const Vector& x) {
        double v = 0;
        for (std::size_t j = 0; j < idx.size(); ++j)
            v += coeffs[j] * monomial(x, idx[j]);
        return v;
    });
}

DilatedBall random_ball(const Grid& grid, const Dilation& d, int k_lo, int k_hi, Rng& rng, double margin)
{
    std::uniform_int_distribution<int> scale(k_lo, k_hi);
    const int n = grid.dim();
    for (int attempt = 0; attempt < 1000; ++attempt) {
        int k = scale(rng);
        Vector ext = d.half_extent(k);
        DilatedBall b{Vector(n), k};
        bool ok = true;
        for (int a = 0; a < n && ok; ++a) {
            double lo = grid.lower()[a] + margin + ext[a], hi = grid.upper()[a] - margin - ext[a];
            if (lo > hi) {
                ok = false;
                break;
            }
            std::uniform_real_distribution<double> u(lo, hi);
            long i = grid.nearest_index(a, u(rng));
            b.center[a] = grid.coord(a, i);
            ok = b.center[a] - ext[a] >= grid.lower()[a] && b.center[a] + ext[a] <= grid.upper()[a];
        }
        if (ok)
            return b;
    }
    fail(ErrorCode::InvalidArgument, "no ball of the requested scales fits the grid");
}

BallConfiguration random_configuration(const Grid& grid, const Dilation& d, int k_lo, int k_hi, int max_balls,
                                       Rng& rng)
{
    std::uniform_int_distribution<int> count(1, max_balls);
    std::uniform_real_distribution<double> w(0.05, 2.0);
    BallConfiguration c;
    int m = count(rng);
    for (int j = 0; j < m; ++j) {
        DilatedBall b = random_ball(grid, d, k_lo, k_hi, rng);
        c.entries.push_back({b, w(rng)});
    }
    return c;
}

ScaleFunction random_scale_function(const Grid& grid, int lmin, int lmax, std::uint64_t seed, double reach)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    ScaleFunction G(grid, lmin, lmax);
    const int n = grid.dim();
    for (int l = lmin; l <= lmax; ++l) {
        Vector c(n);
        for (int a = 0; a < n; ++a)
            c[a] = reach * 0.5 * u(rng);
        double amp = 2 * u(rng), w = 0.3 + 0.4 * std::abs(u(rng));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            Vector x = grid.point(i);
            double r2 = (x - c).squaredNorm() / (w * w);
            G(l, i) = r2 < 1 ? amp * std::pow(1 - r2, 2) * (1 + 0.3 * std::sin(5 * x[0])) : 0.0;
        }
    }
    return G;
}

FiniteAtomicRep random_atomic_rep(const Grid& grid, const Dilation& d, const Exponent& p, double q, int s,
                                  int terms, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> w(0.1, 2);
    FiniteAtomicRep rep;
    for (int t = 0; t < terms; ++t) {
        GridFunction eta = random_smooth(grid, rng());
        DilatedBall b = random_ball(grid, d, -2, 1, rng, 2.0);
        rep.terms.emplace_back(w(rng), make_atom(eta, d, b, q, p, s));
    }
    return rep;
}

Atom sqrt12_atom(const Grid& grid, const Dilation& d)
{
    return make_atom(sample(grid, [](const Vector& x) { return x[0]; }), d, DilatedBall{Vector::Zero(grid.dim()), 0},
                     2, Exponent::constant(grid, 1), 0);
}

}  // namespace anivar::experiments
