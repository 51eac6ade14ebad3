#include "anivar/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "anivar/error.hpp"
#include "anivar/fourier.hpp"
#include "anivar/polynomial.hpp"

namespace anivar {

namespace {

std::optional<std::vector<int>> lattice_index(const Grid& grid, const Vector& c)
{
    std::vector<int> idx(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) {
        long i = grid.nearest_index(a, c[a]);
        if (!grid.in_range(a, i) || grid.coord(a, i) != c[a])
            return std::nullopt;
        idx[a] = static_cast<int>(i);
    }
    return idx;
}

double brute_tent_mass(const ScaleFunction& mu, const Dilation& d, const DilatedBall& ball)
{
    const Grid& grid = mu.grid();
    const int n = grid.dim();
    Vector ext = d.half_extent(ball.scale);
    std::vector<long> lo(n), hi(n);
    for (int a = 0; a < n; ++a) {
        lo[a] = std::max(0L, grid.nearest_index(a, ball.center[a] - ext[a]) - 1);
        hi[a] = std::min<long>(grid.resolution()[a] - 1, grid.nearest_index(a, ball.center[a] + ext[a]) + 1);
        if (lo[a] > hi[a])
            return 0;
    }
    double s = 0;
    for (int l = mu.scale_min(); l <= std::min(mu.scale_max(), ball.scale); ++l) {
        std::vector<long> idx(lo);
        while (true) {
            std::vector<int> ii(idx.begin(), idx.end());
            std::size_t flat = grid.flatten(ii.data());
            double v = mu(l, flat);
            if (v != 0 && tent_contains(d, ball, grid.point(flat), l))
                s += v;
            int a = n - 1;
            while (a >= 0 && idx[a] == hi[a]) {
                idx[a] = lo[a];
                --a;
            }
            if (a < 0)
                break;
            ++idx[a];
        }
    }
    return s * grid.cell_volume();
}

// Composite 16-point Gauss-Legendre nodes and weights on [0, R].
void gauss_legendre(double R, int panels, std::vector<double>& x, std::vector<double>& w)
{
    const int m = 16;
    std::vector<double> t(m), tw(m);
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = m * (z * p1 - p0) / (z * z - 1);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        double p0 = 1, p1 = z;
        for (int k = 2; k <= m; ++k) {
            double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = m * (z * p1 - p0) / (z * z - 1);
        t[i] = z;
        tw[i] = 2 / ((1 - z * z) * dp * dp);
    }
    x.clear();
    w.clear();
    const double hp = R / panels;
    for (int p = 0; p < panels; ++p) {
        for (int i = 0; i < m; ++i) {
            x.push_back(hp * (p + 0.5 * (t[i] + 1)));
            w.push_back(0.5 * hp * tw[i]);
        }
    }
}

double horner(const std::vector<double>& c, double r2)
{
    double v = 0;
    for (std::size_t j = c.size(); j-- > 0;)
        v = v * r2 + c[j];
    return v;
}

bool build_attempt(AnalyzingFunction& out, const Grid& grid, const Dilation& d, double radius)
{
    const int n = d.dim();
    out.radius = radius;
    // (1 - r^2/R^2)^K as a polynomial in r^2, then m Laplacians
    std::vector<double> c(out.K + 1);
    double binom = 1;
    for (int i = 0; i <= out.K; ++i) {
        c[i] = binom * ((i % 2) ? -1.0 : 1.0) / std::pow(radius, 2 * i);
        binom = binom * (out.K - i) / (i + 1);
    }
    std::vector<double> beta = c;
    for (int step = 0; step < out.m; ++step) {
        std::vector<double> nc(c.size() - 1, 0.0);
        for (std::size_t j = 1; j < c.size(); ++j)
            nc[j - 1] = c[j] * 2.0 * j * (2.0 * j + n - 2);
        c = nc;
    }
    out.coefficients = c;
    out.phi = sample(grid, [&](const Vector& x) { return out(x); });
    out.moments = moments(out.phi, out.s);
    out.max_moment = 0;
    for (double v : out.moments)
        out.max_moment = std::max(out.max_moment, std::abs(v));

    // Radial transform of the bump, then multiply by (-4 pi^2 w^2)^m.
    std::vector<double> rx, rw;
    gauss_legendre(radius, n == 1 ? 128 : 64, rx, rw);
    std::vector<double> bvals(rx.size());
    for (std::size_t i = 0; i < rx.size(); ++i)
        bvals[i] = horner(beta, rx[i] * rx[i]);
    const int count = n == 1 ? 8192 : 2048;
    out.table_max = 48.0 / radius;
    out.table_step = out.table_max / (count - 1);
    out.table.assign(count, 0.0);
    const double pi = std::numbers::pi;
    const double nu = 0.5 * n - 1;
    for (int t = 0; t < count; ++t) {
        const double w = t * out.table_step;
        double bh = 0;
        if (n == 1) {
            for (std::size_t i = 0; i < rx.size(); ++i)
                bh += rw[i] * bvals[i] * std::cos(2 * pi * w * rx[i]);
            bh *= 2;
        } else if (w == 0) {
            for (std::size_t i = 0; i < rx.size(); ++i)
                bh += rw[i] * bvals[i] * std::pow(rx[i], n - 1);
            bh *= 2 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
        } else {
            for (std::size_t i = 0; i < rx.size(); ++i)
                bh += rw[i] * bvals[i] * std::cyl_bessel_j(nu, 2 * pi * w * rx[i]) * std::pow(rx[i], 0.5 * n);
            bh *= 2 * pi * std::pow(w, -nu);
        }
        out.table[t] = std::pow(-4 * pi * pi * w * w, out.m) * bh;
    }

    out.annulus_inner = 1.0 / (2.0 * d.frobenius_norm());
    out.annulus_outer = 1.0;
    Vector box = d.half_extent(1);
    std::mt19937_64 rng(0xa11u);
    std::vector<std::uniform_real_distribution<double>> axis;
    for (int a = 0; a < n; ++a)
        axis.emplace_back(-box[a], box[a]);
    out.annulus_samples = 0;
    out.fourier_bound = std::numeric_limits<double>::infinity();
    Vector xi(n);
    for (int tries = 0; tries < 1000000 && out.annulus_samples < 64; ++tries) {
        for (int a = 0; a < n; ++a)
            xi[a] = axis[a](rng);
        double rho = step_quasi_norm(d, xi);
        if (rho < out.annulus_inner || rho > out.annulus_outer)
            continue;
        ++out.annulus_samples;
        out.fourier_bound = std::min(out.fourier_bound, std::abs(out.fourier(xi)));
    }
    if (out.annulus_samples == 0)
        out.fourier_bound = 0;
    return out.fourier_bound >= 1e-6;
}

}  // namespace

double tent_mass(const ScaleFunction& mu, const Dilation& d, const DilatedBall& ball)
{
    return brute_tent_mass(mu, d, ball);
}

CarlesonEvaluator::CarlesonEvaluator(const ScaleFunction& mu, const Exponent& p, const Dilation& d, double eta)
    : mu_(mu), p_(p), d_(d), eta_(eta), stencils_(mu.grid(), d)
{
    if (!(eta > 0))
        fail(ErrorCode::InvalidArgument, "eta must be positive");
    if (p.grid() != mu.grid())
        fail(ErrorCode::InvalidArgument, "exponent and density live on different grids");
}

CarlesonEvaluator::BallData& CarlesonEvaluator::data(const DilatedBall& ball)
{
    std::pair<int, std::vector<double>> key{ball.scale, std::vector<double>(ball.center.data(),
                                                                            ball.center.data() + ball.center.size())};
    auto it = cache_.find(key);
    if (it != cache_.end())
        return it->second;
    BallData bd;
    bd.points = ball_points(mu_.grid(), d_, ball);
    if (bd.points.empty())
        fail(ErrorCode::EmptyMask, "ball contains no lattice point");
    return cache_.emplace(std::move(key), std::move(bd)).first->second;
}

double CarlesonEvaluator::mass(const DilatedBall& ball)
{
    BallData& bd = data(ball);
    if (bd.mass >= 0)
        return bd.mass;
    const Grid& grid = mu_.grid();
    auto idx = lattice_index(grid, ball.center);
    if (!idx) {
        bd.mass = brute_tent_mass(mu_, d_, ball);
        return bd.mass;
    }
    double s = 0;
    for (int l = mu_.scale_min(); l <= std::min(mu_.scale_max(), ball.scale); ++l) {
        const double* layer = mu_.layer(l);
        for_each_offset(grid, idx->data(), stencils_.tent(l, ball.scale),
                        [&](std::size_t flat, std::size_t) { s += layer[flat]; });
    }
    bd.mass = s * grid.cell_volume();
    return bd.mass;
}

double CarlesonEvaluator::indicator_norm(const DilatedBall& ball)
{
    BallData& bd = data(ball);
    if (bd.norm < 0)
        bd.norm = anivar::indicator_norm(bd.points, p_);
    return bd.norm;
}

double CarlesonEvaluator::term(const ConfigEntry& e)
{
    if (e.weight <= 0)
        return 0;
    return e.weight * std::sqrt(ball_volume(d_, e.ball)) / indicator_norm(e.ball) * std::sqrt(mass(e.ball));
}

double CarlesonEvaluator::functional(const BallConfiguration& config)
{
    if (!config.valid())
        fail(ErrorCode::InvalidArgument, "configuration needs a positive weight and no negative ones");
    std::vector<std::pair<const std::vector<std::size_t>*, double>> parts;
    std::size_t positive = 0;
    double single = 0;
    double sum = 0;
    for (const auto& e : config.entries) {
        if (e.weight <= 0)
            continue;
        ++positive;
        single = e.weight;
        parts.emplace_back(&data(e.ball).points, e.weight / indicator_norm(e.ball));
        sum += term(e);
    }
    double agg = positive == 1 ? single : aggregate_parts(p_, eta_, parts);
    if (!(agg > 0))
        fail(ErrorCode::ZeroDenominator, "aggregate norm vanishes");
    return sum / agg;
}

double carleson_value(const ScaleFunction& mu, const Exponent& p, const Dilation& d, double eta,
                      const BallConfiguration& config)
{
    return CarlesonEvaluator(mu, p, d, eta).functional(config);
}

NormEstimate carleson_functional(const ScaleFunction& mu, const Exponent& p, const Dilation& d, double eta,
                                 const SearchOptions& search)
{
    for (double v : mu.values()) {
        if (v < 0)
            fail(ErrorCode::InvalidArgument, "Carleson density must be nonnegative");
    }
    CarlesonEvaluator ev(mu, p, d, eta);
    SearchOptions opt = search;
    opt.weight_ascent = false;
    auto candidates = candidate_balls(mu.grid(), d, opt);
    SearchResult r = search_configurations(candidates, opt, [&](const BallConfiguration& c) {
        try {
            return ev.functional(c);
        } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    });
    return {r.value, r.argmax, r.best_single, r.evaluated};
}

double AnalyzingFunction::operator()(const Vector& x) const
{
    double r2 = x.squaredNorm();
    if (r2 >= radius * radius)
        return 0;
    return horner(coefficients, r2);
}

double AnalyzingFunction::fourier(double omega) const
{
    omega = std::abs(omega);
    if (table.empty() || omega >= table_max)
        return 0;
    double u = omega / table_step;
    std::size_t i = static_cast<std::size_t>(u);
    double t = u - static_cast<double>(i);
    auto at = [&](long j) {
        j = std::clamp<long>(j, 0, static_cast<long>(table.size()) - 1);
        return table[static_cast<std::size_t>(j)];
    };
    // even extension below 0, Catmull-Rom in between
    double p0 = i == 0 ? at(1) : at(static_cast<long>(i) - 1);
    double p1 = at(static_cast<long>(i)), p2 = at(static_cast<long>(i) + 1), p3 = at(static_cast<long>(i) + 2);
    return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
}

Kernel AnalyzingFunction::kernel() const
{
    Kernel k;
    AnalyzingFunction copy = *this;
    copy.phi = GridFunction();
    copy.table.clear();
    k.eval = [copy](const Vector& x) { return copy(x); };
    k.support_level = 0;
    k.vanishing_moments = s;
    return k;
}

AnalyzingFunction build_analyzing_function(const Grid& grid, const Dilation& d, int s)
{
    if (s < 0)
        fail(ErrorCode::InvalidArgument, "s must be nonnegative");
    if (grid.dim() != d.dim())
        fail(ErrorCode::InvalidArgument, "grid and dilation dimensions differ");
    AnalyzingFunction out;
    out.s = s;
    out.m = std::max(1, (s + 2) / 2);
    out.K = 2 * out.m + 8;
    const double inner = d.inscribed_radius(0);
    for (double factor : {0.9, 0.6}) {
        ++out.attempts;
        if (build_attempt(out, grid, d, factor * inner))
            return out;
    }
    fail(ErrorCode::FourierBoundFailure,
         "analyzing function transform drops below 1e-6 on the annulus (" + std::to_string(out.fourier_bound) + ")");
}

double calderon_multiplier(const AnalyzingFunction& phi, const Dilation& d, const Vector& xi)
{
    double den = 0;
    for (int k = -d.level_cap(); k <= d.level_cap(); ++k) {
        double v = phi.fourier(d.power(k).transpose() * xi);
        den += v * v;
    }
    return den > 0 ? phi.fourier(xi) / den : 0.0;
}

namespace {

ScaleFunction density_from_kernel(const GridFunction& b, const Kernel& kern, const Dilation& d, int scale_min,
                                  int scale_max)
{
    const Grid& grid = b.grid();
    ScaleFunction out(grid, scale_min, scale_max);
    std::vector<int> base(grid.dim());
    for (int l = scale_min; l <= scale_max; ++l) {
        ScaledKernel sk = scale_kernel(kern, grid, d, -l);
        GridFunction c = convolve(b, sk);
        double* layer = out.layer(l);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            grid.unflatten(i, base.data());
            layer[i] = stencil_inside(grid, base.data(), sk.stencil) ? c[i] * c[i] : 0.0;
        }
    }
    return out;
}

}  // namespace

ScaleFunction carleson_from_function(const GridFunction& b, const AnalyzingFunction& phi, const Dilation& d,
                                     int scale_min, int scale_max)
{
    return density_from_kernel(b, phi.kernel(), d, scale_min, scale_max);
}

ScaleFunction carleson_from_function(const GridFunction& b, const GridFunction& phi, const Dilation& d,
                                     int scale_min, int scale_max, int vanishing_moments)
{
    return density_from_kernel(b, Kernel::from_grid(phi, d, vanishing_moments), d, scale_min, scale_max);
}

double CarlesonDualityReport::min_slack() const
{
    return std::min({slack_triangle, slack_split, slack_cauchy});
}

CarlesonDualityReport carleson_duality_check(const FiniteAtomicRep& f_rep, const GridFunction& b,
                                             const AnalyzingFunction& phi, const Dilation& d, const Exponent& p,
                                             const CarlesonDualityOptions& opt)
{
    CarlesonDualityReport rep;
    GridFunction f = f_rep.function();
    const Grid& grid = f.grid();
    if (b.grid() != grid)
        fail(ErrorCode::InvalidArgument, "f and b live on different grids");
    const double h = grid.cell_volume();
    rep.direct = dual_pairing(f, b);

    SpectralDomain dom = SpectralDomain::padded(grid, opt.pad_factor);
    ComplexArray fhat = dom.forward(f);
    ComplexArray bhat = dom.forward(b);
    ScaleFunction G(grid, opt.scale_min, opt.scale_max), H(grid, opt.scale_min, opt.scale_max);
    std::vector<double> mpsi(dom.size()), mphi(dom.size());
    Vector xi(grid.dim());
    for (int l = opt.scale_min; l <= opt.scale_max; ++l) {
        const Matrix at = d.power(l).transpose();
        for (std::size_t i = 0; i < dom.size(); ++i) {
            dom.frequency(i, xi.data());
            Vector eta = at * xi;
            mphi[i] = phi.fourier(eta);
            mpsi[i] = calderon_multiplier(phi, d, eta);
        }
        GridFunction g = dom.apply(fhat, mpsi);
        GridFunction hh = dom.apply(bhat, mphi);
        std::copy(g.values().begin(), g.values().end(), G.layer(l));
        std::copy(hh.values().begin(), hh.values().end(), H.layer(l));
    }
    for (std::size_t i = 0; i < G.size(); ++i)
        rep.reproduced += G.values()[i] * H.values()[i];
    rep.reproduced *= h;
    rep.defect = rep.direct != 0 ? std::abs(rep.direct - rep.reproduced) / std::abs(rep.direct)
                                 : std::abs(rep.reproduced);

    double s0 = 0;
    for (std::size_t i = 0; i < G.size(); ++i) {
        s0 += G.values()[i] * H.values()[i];
        rep.s1 += std::abs(G.values()[i] * H.values()[i]);
    }
    rep.s0 = std::abs(s0 * h);
    rep.s1 *= h;

    double gmax = 0;
    for (double v : G.values())
        gmax = std::max(gmax, std::abs(v));
    ScaleFunction Gd = G;
    for (double& v : Gd.values()) {
        if (std::abs(v) < opt.drop_relative * gmax)
            v = 0;
    }
    DecompositionOptions dopt;
    dopt.gamma = opt.gamma;
    dopt.leakage_bound = opt.leakage_bound;
    TentAtomSet set = tent_atomic_decomposition(Gd, p, d, dopt);
    rep.atoms = set.atoms.size();
    rep.leakage_ratio = set.leakage_ratio;

    ScaleFunction mu = H;
    for (double& v : mu.values())
        v = v * v;
    CarlesonEvaluator ev(mu, p, d, 1.0);
    std::vector<char> covered(G.size(), 0);
    for (const auto& a : set.atoms) {
        double cross = 0, sq = 0;
        for (std::size_t t = 0; t < a.nodes.size(); ++t) {
            covered[a.nodes[t]] = 1;
            cross += std::abs(a.values[t] * H.values()[a.nodes[t]]);
            sq += a.values[t] * a.values[t];
        }
        double root_mass = std::sqrt(ev.mass(a.ball));
        rep.s2 += a.lambda * cross * h;
        rep.s3 += a.lambda * std::sqrt(sq * h) * root_mass;
        GridFunction area = lusin_area(a.dense(G), d);
        double l2 = 0;
        for (double v : area.values())
            l2 += v * v;
        rep.s4 += a.lambda * std::sqrt(l2 * h) * root_mass;
    }
    for (std::size_t i = 0; i < G.size(); ++i) {
        if (!covered[i])
            rep.leak += std::abs(G.values()[i] * H.values()[i]);
    }
    rep.leak *= h;
    auto rel = [](double hi, double lo) {
        double sc = std::max(std::abs(hi), std::abs(lo));
        return sc > 0 ? (hi - lo) / sc : 0.0;
    };
    rep.slack_triangle = rel(rep.s1, rep.s0);
    rep.slack_split = rel(rep.s2 + rep.leak, rep.s1);
    rep.slack_cauchy = rel(rep.s3, rep.s2);
    return rep;
}

}  // namespace anivar
