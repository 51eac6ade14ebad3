#include "anivar/exponent.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include "anivar/error.hpp"

namespace anivar {

Exponent::Exponent(GridFunction values, double p_infinity)
    : p_infinity_(p_infinity)
{
    if (values.size() == 0)
        fail(ErrorCode::InvalidArgument, "empty exponent");
    p_minus_ = INFINITY;
    p_plus_ = 0;
    for (double v : values.values()) {
        if (!(v > 0) || !std::isfinite(v))
            fail(ErrorCode::InvalidArgument, "exponent values must be positive and finite");
        p_minus_ = std::min(p_minus_, v);
        p_plus_ = std::max(p_plus_, v);
    }
    values_ = std::make_shared<const GridFunction>(std::move(values));
}

Exponent Exponent::constant(const Grid& grid, double q)
{
    return Exponent(GridFunction(grid, q), q);
}

Exponent Exponent::with_log_holder(const LogHolderReport& r) const
{
    Exponent out = *this;
    out.report_ = r;
    return out;
}

LuxemburgResult luxemburg_sparse(const std::vector<double>& absvals, const std::vector<double>& exps,
                                 double cell_volume)
{
    LuxemburgResult res;
    bool any = false;
    for (double v : absvals) {
        if (!std::isfinite(v))
            fail(ErrorCode::NonFinite, "non-finite value in Luxemburg norm");
        any = any || v != 0.0;
    }
    if (!any)
        return res;

    // Group by exponent: modular(1/lambda) = sum_g lambda^{-p_g} S_g.
    std::map<double, double> groups;
    for (std::size_t i = 0; i < absvals.size(); ++i) {
        if (absvals[i] == 0.0)
            continue;
        groups[exps[i]] += 0.0;
        if (groups.size() > 64)
            break;
    }
    std::function<double(double)> mod;
    std::vector<std::pair<double, double>> g;
    double vmax = 0;
    for (double v : absvals)
        vmax = std::max(vmax, v);
    if (groups.size() <= 64) {
        // normalise by vmax to keep powers in range
        std::map<double, double> sums;
        for (std::size_t i = 0; i < absvals.size(); ++i)
            if (absvals[i] != 0.0)
                sums[exps[i]] += std::pow(absvals[i] / vmax, exps[i]);
        for (auto& [p, s] : sums)
            g.emplace_back(p, s * cell_volume);
        mod = [&g, vmax](double lambda) {
            double t = vmax / lambda, acc = 0;
            for (auto& [p, s] : g)
                acc += s * std::pow(t, p);
            return acc;
        };
    } else {
        mod = [&](double lambda) {
            double acc = 0;
            for (std::size_t i = 0; i < absvals.size(); ++i)
                if (absvals[i] != 0.0)
                    acc += std::pow(absvals[i] / lambda, exps[i]);
            return acc * cell_volume;
        };
    }

    double lo, hi = vmax;
    int guard = 0;
    if (mod(hi) <= 1.0) {
        lo = hi * 0.5;
        while (mod(lo) <= 1.0) {
            hi = lo;
            lo *= 0.5;
            if (++guard > 4000 || lo == 0.0)
                fail(ErrorCode::NonFinite, "Luxemburg bracket underflow");
        }
    } else {
        lo = hi;
        hi *= 2.0;
        while (!(mod(hi) <= 1.0)) {
            lo = hi;
            hi *= 2.0;
            if (++guard > 4000 || !std::isfinite(hi))
                fail(ErrorCode::NonFinite, "modular stays above 1 for every bracket");
        }
    }
    int it = 0;
    while (hi - lo > 1e-12 * hi && it < 200) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (mod(mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
        ++it;
    }
    res.norm = hi;
    res.upper = hi;
    res.lower = lo;
    res.iterations = it;
    res.modular_at_norm = mod(hi);
    return res;
}

double modular(const GridFunction& f, const Exponent& p)
{
    if (f.grid() != p.grid())
        fail(ErrorCode::InvalidArgument, "function and exponent grids differ");
    double acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] != 0.0)
            acc += std::pow(std::abs(f[i]), p[i]);
    return acc * f.grid().cell_volume();
}

LuxemburgResult luxemburg_solve(const GridFunction& f, const Exponent& p)
{
    if (f.grid() != p.grid())
        fail(ErrorCode::InvalidArgument, "function and exponent grids differ");
    std::vector<double> a, e;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] != 0.0) {
            a.push_back(std::abs(f[i]));
            e.push_back(p[i]);
        }
    }
    return luxemburg_sparse(a, e, f.grid().cell_volume());
}

double luxemburg_norm(const GridFunction& f, const Exponent& p)
{
    return luxemburg_solve(f, p).norm;
}

double indicator_norm(const std::vector<std::size_t>& points, const Exponent& p)
{
    if (points.empty())
        fail(ErrorCode::EmptyMask, "indicator of an empty lattice set");
    std::vector<double> a(points.size(), 1.0), e(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        e[i] = p[points[i]];
    return luxemburg_sparse(a, e, p.grid().cell_volume()).norm;
}

double indicator_norm(const Dilation& d, const DilatedBall& ball, const Exponent& p)
{
    return indicator_norm(ball_points(p.grid(), d, ball), p);
}

namespace {

double pair_value(const Exponent& p, const Dilation& d, std::size_t i, std::size_t j)
{
    const Grid& g = p.grid();
    double dp = std::abs(p[i] - p[j]);
    if (dp == 0.0)
        return 0.0;
    double rho = step_quasi_norm(d, g.point(i) - g.point(j));
    return dp * std::log(std::numbers::e + 1.0 / rho);
}

}  // namespace

LogHolderReport check_log_holder(const Exponent& p, const Dilation& d, std::size_t sample_pairs, std::uint64_t seed)
{
    const Grid& g = p.grid();
    const std::size_t n = g.size();
    LogHolderReport rep;
    rep.pairs = sample_pairs;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    double c_half = 0, c_full = 0;
    for (std::size_t s = 0; s < 2 * sample_pairs; ++s) {
        std::size_t i = pick(rng), j = pick(rng);
        if (i == j)
            continue;
        double v = pair_value(p, d, i, j);
        c_full = std::max(c_full, v);
        if (s < sample_pairs)
            c_half = c_full;
    }
    double ci_half = 0, ci_full = 0;
    for (std::size_t s = 0; s < 2 * sample_pairs; ++s) {
        std::size_t i = pick(rng);
        double v = std::abs(p[i] - p.p_infinity());
        if (v != 0.0) {
            auto lvl = d.level(g.point(i));
            double rho = lvl ? d.b_power(*lvl) : 0.0;
            v *= std::log(std::numbers::e + rho);
        }
        ci_full = std::max(ci_full, v);
        if (s < sample_pairs)
            ci_half = ci_full;
    }
    rep.c_log = c_half;
    rep.c_log_doubled = c_full;
    rep.c_inf = ci_half;
    rep.c_inf_doubled = ci_full;
    auto close = [](double a, double b) { return (a == 0 && b == 0) || std::abs(b - a) <= 0.1 * std::max(a, b); };
    rep.stable_under_doubling = close(c_half, c_full) && close(ci_half, ci_full);

    // sharpest adjacent jump
    const int dim = g.dim();
    std::vector<int> idx(dim);
    double best = 0;
    std::size_t bi = 0;
    int baxis = 0;
    for (std::size_t i = 0; i < n; ++i) {
        g.unflatten(i, idx.data());
        for (int a = 0; a < dim; ++a) {
            if (idx[a] + 1 >= g.resolution()[a])
                continue;
            double jump = std::abs(p[i + g.stride(a)] - p[i]);
            if (jump > best) {
                best = jump;
                bi = i;
                baxis = a;
            }
        }
    }
    rep.max_adjacent_jump = best;
    if (best > 0) {
        g.unflatten(bi, idx.data());
        int left = idx[baxis], right = idx[baxis] + 1;
        int mmax = std::min({63, left, g.resolution()[baxis] - 1 - right});
        auto at = [&](int m) {
            std::size_t i = bi - static_cast<std::size_t>(m) * g.stride(baxis);
            std::size_t j = bi + static_cast<std::size_t>(1 + m) * g.stride(baxis);
            return pair_value(p, d, i, j);
        };
        double near = at(0), far = at(mmax);
        rep.nested_growth = far > 0 ? near / far : (near > 0 ? INFINITY : 0.0);
        rep.unbounded_growth = mmax > 0 && rep.nested_growth > 1.1;
    }
    rep.stable = rep.stable_under_doubling && !rep.unbounded_growth;
    return rep;
}

Exponent conjugate(const Exponent& p)
{
    if (!(p.p_minus() > 1.0))
        fail(ErrorCode::NotConjugable, "p_minus = " + std::to_string(p.p_minus()) + " <= 1");
    GridFunction v = p.values();
    for (auto& x : v.values())
        x = x / (x - 1.0);
    double pinf = p.p_infinity() > 1.0 ? p.p_infinity() / (p.p_infinity() - 1.0) : INFINITY;
    return Exponent(std::move(v), pinf);
}

}  // namespace anivar
