#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "anivar/dilation.hpp"
#include "anivar/grid.hpp"

namespace oracle {

using anivar::Grid;
using anivar::GridFunction;
using anivar::Matrix;
using anivar::Vector;

inline Matrix mat1(double a)
{
    Matrix m(1, 1);
    m << a;
    return m;
}

inline Matrix diag2(double a, double b)
{
    Matrix m(2, 2);
    m << a, 0, 0, b;
    return m;
}

inline Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

inline Grid desk_1d(int resolution = 4096)
{
    return Grid::cube(1, -8, 8, resolution);
}

// Random smooth function: a few bumps and low-order terms.
inline GridFunction random_smooth(const Grid& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    const int n = g.dim();
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
    double lin = u(rng);
    return anivar::sample(g, [&](const Vector& x) {
        double v = lin * x[0] + 0.5 * std::sin(3 * x.sum());
        for (std::size_t t = 0; t < c.size(); ++t)
            v += amp[t] * std::exp(-(x - c[t]).squaredNorm() / width[t]);
        return v;
    });
}

// Plain L^q quadrature norm, written independently of the Luxemburg solver.
inline double lq_norm(const GridFunction& f, double q)
{
    long double s = 0;
    for (double v : f.values())
        s += std::pow(static_cast<long double>(std::abs(v)), static_cast<long double>(q));
    return static_cast<double>(std::pow(s * f.grid().cell_volume(), 1.0L / q));
}

// Points of a 1D interval (c - w/2, c + w/2) on the lattice by direct comparison.
inline std::vector<std::size_t> interval_points(const Grid& g, double lo, double hi)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.coord(0, static_cast<long>(i));
        if (x > lo && x < hi)
            out.push_back(i);
    }
    return out;
}

}  // namespace oracle
