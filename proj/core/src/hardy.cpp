#include "anivar/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "anivar/convolution.hpp"
#include "anivar/error.hpp"
#include "anivar/polynomial.hpp"

namespace anivar {

namespace {

double lq_on(const std::vector<double>& vals, double q, double h)
{
    if (std::isinf(q)) {
        double m = 0;
        for (double v : vals)
            m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0;
    for (double v : vals)
        s += std::pow(std::abs(v), q);
    return std::pow(s * h, 1.0 / q);
}

double conjugate_exponent(double q)
{
    if (std::isinf(q))
        return 1.0;
    if (!(q > 1))
        fail(ErrorCode::NotConjugable, "atom exponent must exceed 1");
    return q / (q - 1.0);
}

double rel_slack(double rhs, double lhs)
{
    double scale = std::max(std::abs(rhs), std::abs(lhs));
    if (scale == 0)
        return 0;
    return (rhs - lhs) / scale;
}

}  // namespace

AtomValidation validate_atom(const Atom& a, const Dilation& d, const Exponent& p, double size_tol, double moment_tol)
{
    AtomValidation v;
    const Grid& g = a.values.grid();
    auto pts = ball_points(g, d, a.ball);
    std::vector<char> inside(g.size(), 0);
    for (std::size_t i : pts)
        inside[i] = 1;
    std::vector<double> on;
    on.reserve(pts.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (inside[i])
            on.push_back(a.values[i]);
        else
            v.outside_max = std::max(v.outside_max, std::abs(a.values[i]));
    }
    v.support_ok = v.outside_max == 0;
    v.size = lq_on(on, a.r, g.cell_volume());
    double vol = ball_volume(d, a.ball);
    double nrm = pts.empty() ? 0.0 : indicator_norm(pts, p);
    v.size_bound = (std::isinf(a.r) ? 1.0 : std::pow(vol, 1.0 / a.r)) / nrm;
    v.size_ok = v.size <= v.size_bound * (1 + size_tol);
    double mres = 0;
    if (a.s >= 0 && !pts.empty()) {
        for (double m : local_moments(a.values, d, a.ball, a.s))
            mres = std::max(mres, std::abs(m));
    }
    v.moment_residual = v.size > 0 ? mres / v.size : mres;
    v.moments_ok = mres <= moment_tol * v.size;
    return v;
}

Atom make_atom(const GridFunction& seed, const Dilation& d, const DilatedBall& ball, double q, const Exponent& p,
               int s)
{
    if (!(q >= 1) || std::isinf(q))
        fail(ErrorCode::InvalidArgument, "atom construction needs a finite q >= 1");
    const Grid& g = seed.grid();
    BallSamples bs = ball_samples(g, d, ball, s);
    Polynomial P = minimizing_polynomial(seed, d, bs);
    std::vector<double> res(bs.points.size());
    for (std::size_t t = 0; t < bs.points.size(); ++t) {
        double pv = 0;
        for (int c = 0; c < bs.basis.cols(); ++c)
            pv += bs.basis(static_cast<Eigen::Index>(t), c) * P.coefficients()[c];
        res[t] = seed[bs.points[t]] - pv;
    }
    double rn = lq_on(res, q, g.cell_volume());
    if (!(rn >= 1e-12))
        fail(ErrorCode::DegenerateSeed, "seed is a polynomial of degree <= s on the ball");
    double nrm = indicator_norm(bs.points, p);
    double scale = std::pow(ball_volume(d, ball), 1.0 / q) / (nrm * rn);
    Atom a;
    a.ball = ball;
    a.r = q;
    a.s = s;
    a.values = GridFunction(g);
    for (std::size_t t = 0; t < bs.points.size(); ++t)
        a.values[bs.points[t]] = scale * res[t];
    a.validation = validate_atom(a, d, p);
    return a;
}

GridFunction FiniteAtomicRep::function() const
{
    if (terms.empty())
        fail(ErrorCode::InvalidArgument, "atomic representation has no terms");
    GridFunction f(terms.front().second.values.grid());
    for (const auto& [lam, a] : terms) {
        for (std::size_t i = 0; i < f.size(); ++i)
            f[i] += lam * a.values[i];
    }
    return f;
}

BallConfiguration FiniteAtomicRep::configuration() const
{
    BallConfiguration c;
    for (const auto& [lam, a] : terms)
        c.entries.push_back({a.ball, lam});
    return c;
}

double finite_atomic_norm(const FiniteAtomicRep& rep, const Dilation& d, const Exponent& p)
{
    return aggregate_norm(rep.configuration(), d, p, p.underline_p());
}

int finest_resolvable_scale(const Grid& grid, const Dilation& d, int support_level)
{
    int best = -d.level_cap() + support_level;
    for (int k = best; k <= d.level_cap() + support_level; ++k) {
        Vector ext = d.half_extent(support_level - k);
        bool ok = true;
        for (int a = 0; a < grid.dim(); ++a)
            ok = ok && 2.0 * ext[a] >= grid.spacing(a);
        if (!ok || ball_stencil(grid, d, support_level - k).count() == 0)
            break;
        best = k;
    }
    return best;
}

GridFunction radial_maximal(const GridFunction& f, const GridFunction& phi, const Dilation& d, int k_lo, int k_hi,
                            double margin)
{
    if (k_lo > k_hi)
        fail(ErrorCode::InvalidArgument, "empty scale window");
    Kernel kern = Kernel::from_grid(phi, d);
    GridFunction out(f.grid());
    for (int k = k_lo; k <= k_hi; ++k) {
        GridFunction c = convolve(f, scale_kernel(kern, f.grid(), d, k));
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = std::max(out[i], std::abs(c[i]));
    }
    if (margin > 0) {
        GridFunction mask = boundary_margin(f.grid(), margin);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] *= mask[i];
    }
    return out;
}

double hardy_norm_estimate(const GridFunction& f, const GridFunction& phi, const Exponent& p, const Dilation& d,
                           int k_lo, int k_hi, double margin)
{
    return luxemburg_norm(radial_maximal(f, phi, d, k_lo, k_hi, margin), p);
}

double dual_pairing(const GridFunction& f, const GridFunction& g)
{
    if (f.grid() != g.grid())
        fail(ErrorCode::InvalidArgument, "pairing of functions on different grids");
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += f[i] * g[i];
    return s * f.grid().cell_volume();
}

DualityChainReport duality_chain_check(const FiniteAtomicRep& rep, const GridFunction& g, const Dilation& d,
                                       const CampanatoParams& prm, int polys_per_atom, std::uint64_t seed)
{
    DualityChainReport out;
    const double q = prm.q;
    const double qc = conjugate_exponent(q);
    if (std::isinf(qc))
        fail(ErrorCode::NotConjugable, "conjugate exponent is infinite");
    for (const auto& [lam, a] : rep.terms) {
        if (a.r != q)
            fail(ErrorCode::InvalidArgument, "atom exponent differs from the parameter q");
    }
    const Grid& grid = g.grid();
    const double h = grid.cell_volume();
    GridFunction f = rep.function();
    out.pairing = std::abs(dual_pairing(f, g));

    CampanatoParams cprm = prm;
    cprm.q = qc;
    cprm.eta = prm.p.underline_p();
    CampanatoEvaluator ev(g, d, cprm);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-10.0, 10.0);
    out.slack_vanishing = 0;
    out.slack_holder = 0;
    for (const auto& [lam, a] : rep.terms) {
        AtomChainStep st;
        st.weight = lam;
        BallSamples bs = ball_samples(grid, d, a.ball, a.s);
        std::vector<double> av(bs.points.size()), gv(bs.points.size());
        double a_l1 = 0, g_max = 0;
        for (std::size_t t = 0; t < bs.points.size(); ++t) {
            av[t] = a.values[bs.points[t]];
            gv[t] = g[bs.points[t]];
            a_l1 += std::abs(av[t]) * h;
            g_max = std::max(g_max, std::abs(gv[t]));
        }
        double ag = 0;
        for (std::size_t t = 0; t < av.size(); ++t)
            ag += av[t] * gv[t];
        // the atom's support is inside the ball, so this is the whole-space pairing
        st.pairing = ag * h;

        const Eigen::Index dim = bs.basis.cols();
        for (int r = 0; r < polys_per_atom; ++r) {
            Vector c(dim);
            for (Eigen::Index j = 0; j < dim; ++j)
                c[j] = coef(rng);
            double s = 0, pmax = 0;
            for (std::size_t t = 0; t < av.size(); ++t) {
                double pv = bs.basis.row(static_cast<Eigen::Index>(t)).dot(c);
                pmax = std::max(pmax, std::abs(pv));
                s += av[t] * (gv[t] - pv);
            }
            double gap = std::abs(std::abs(s * h) - std::abs(st.pairing));
            st.max_vanishing_gap = std::max(st.max_vanishing_gap, gap);
            double scale = a_l1 * (g_max + pmax);
            if (scale > 0)
                out.slack_vanishing = std::min(out.slack_vanishing, -gap / scale);
        }

        // P_j: the better of the projection and the refined L^{q'} fit
        Polynomial proj = minimizing_polynomial(g, d, bs);
        Vector best = proj.coefficients();
        double best_err = lq_error(g, bs, best, qc);
        if (qc != 2) {
            LqFit fit = refine_lq(g, d, bs, qc);
            if (fit.refined_error < best_err) {
                best_err = fit.refined_error;
                best = fit.refined.coefficients();
            }
        }
        std::vector<double> dev(av.size());
        double lhs = 0;
        for (std::size_t t = 0; t < av.size(); ++t) {
            dev[t] = gv[t] - bs.basis.row(static_cast<Eigen::Index>(t)).dot(best);
            lhs += av[t] * dev[t];
        }
        st.holder_lhs = std::abs(lhs * h);
        st.holder_rhs = lq_on(av, q, h) * lq_on(dev, qc, h);
        out.slack_holder = std::min(out.slack_holder, rel_slack(st.holder_rhs, st.holder_lhs));

        double vol = ball_volume(d, a.ball);
        double avg = std::pow(best_err / vol, 1.0 / qc);
        st.bound_term = vol / ev.indicator_norm(a.ball) * avg;

        out.triangle_sum += lam * std::abs(st.pairing);
        out.holder_sum += lam * st.holder_rhs;
        out.bound += lam * st.bound_term;
        out.steps.push_back(st);
    }

    BallConfiguration config = rep.configuration();
    out.atomic_norm = finite_atomic_norm(rep, d, prm.p);
    out.campanato_value = ev.functional(config);
    double product = out.campanato_value * out.atomic_norm;
    out.ratio = product > 0 ? out.pairing / product : 0.0;
    out.slack_aggregation = std::min({rel_slack(out.triangle_sum, out.pairing),
                                      rel_slack(out.bound, out.holder_sum), rel_slack(product, out.bound)});
    return out;
}

DilationInequalityReport dilation_indicator_inequality(const BallConfiguration& config, const Dilation& d,
                                                       const Exponent& p, int max_k, double r_aux)
{
    if (!(r_aux > 0 && r_aux < p.underline_p()))
        fail(ErrorCode::InvalidArgument, "auxiliary r must lie in (0, min(1, p_-))");
    if (max_k < 0)
        fail(ErrorCode::InvalidArgument, "max_k must be nonnegative");
    const Grid& grid = p.grid();
    DilationInequalityReport rep;
    rep.bound = 1.0 / r_aux + 0.05;
    for (int k = 0; k <= max_k; ++k) {
        GridFunction sum(grid);
        for (const auto& e : config.entries) {
            DilatedBall big{e.ball.center, e.ball.scale + k};
            Vector ext = d.half_extent(big.scale);
            for (int a = 0; a < grid.dim(); ++a) {
                if (big.center[a] - ext[a] < grid.lower()[a] || big.center[a] + ext[a] > grid.upper()[a])
                    rep.truncated = true;
            }
            for (std::size_t i : ball_points(grid, d, big))
                sum[i] += 1.0;
        }
        rep.values.push_back(luxemburg_norm(sum, p));
    }
    if (max_k == 0) {
        rep.slope = 0;
    } else {
        // least squares slope of log L(k) against k log b
        const double lb = std::log(d.b());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = max_k + 1;
        for (int k = 0; k <= max_k; ++k) {
            double x = k * lb, y = std::log(rep.values[k]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    rep.holds = rep.slope <= rep.bound;
    return rep;
}

}  // namespace anivar
