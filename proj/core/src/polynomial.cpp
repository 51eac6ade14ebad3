#include "anivar/polynomial.hpp"

#include <cmath>

#include "anivar/error.hpp"

namespace anivar {

namespace {

void compositions(int n, int total, int axis, MultiIndex& cur, std::vector<MultiIndex>& out)
{
    if (axis == n - 1) {
        cur[axis] = total;
        out.push_back(cur);
        return;
    }
    for (int v = total; v >= 0; --v) {
        cur[axis] = v;
        compositions(n, total - v, axis + 1, cur, out);
    }
}

double ipow(double x, int e)
{
    double r = 1;
    for (int i = 0; i < e; ++i)
        r *= x;
    return r;
}

double lq_sum(const std::vector<double>& r, double q)
{
    double s = 0;
    if (q == 1.0) {
        for (double v : r)
            s += std::abs(v);
    } else if (q == 2.0) {
        for (double v : r)
            s += v * v;
    } else {
        for (double v : r)
            s += std::pow(std::abs(v), q);
    }
    return s;
}

}  // namespace

std::vector<MultiIndex> multi_indices(int n, int s)
{
    std::vector<MultiIndex> out;
    MultiIndex cur(n, 0);
    for (int deg = 0; deg <= s; ++deg)
        compositions(n, deg, 0, cur, out);
    return out;
}

std::size_t polynomial_dimension(int n, int s)
{
    // C(n+s, s)
    double c = 1;
    for (int i = 1; i <= s; ++i)
        c = c * (n + i) / i;
    return static_cast<std::size_t>(std::llround(c));
}

double monomial(const Vector& u, const MultiIndex& gamma)
{
    double r = 1;
    for (std::size_t a = 0; a < gamma.size(); ++a)
        r *= ipow(u[a], gamma[a]);
    return r;
}

Polynomial::Polynomial(int n, int s)
    : s_(s), idx_(multi_indices(n, s)), center_(Vector::Zero(n)), to_local_(Matrix::Identity(n, n)),
      coeffs_(Vector::Zero(static_cast<Eigen::Index>(idx_.size())))
{
}

Polynomial::Polynomial(int s, Vector center, Matrix to_local, Vector coeffs)
    : s_(s), idx_(multi_indices(static_cast<int>(center.size()), s)), center_(std::move(center)),
      to_local_(std::move(to_local)), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() == 0)
        coeffs_ = Vector::Zero(static_cast<Eigen::Index>(idx_.size()));
    if (coeffs_.size() != static_cast<Eigen::Index>(idx_.size()))
        fail(ErrorCode::InvalidArgument, "coefficient count does not match degree");
}

Polynomial Polynomial::in_ball(const Dilation& d, const DilatedBall& ball, int s, const Vector& coeffs)
{
    return Polynomial(s, ball.center, d.power(-ball.scale), coeffs);
}

double Polynomial::evaluate_local(const Vector& u) const
{
    double acc = 0;
    for (std::size_t j = 0; j < idx_.size(); ++j)
        acc += coeffs_[static_cast<Eigen::Index>(j)] * monomial(u, idx_[j]);
    return acc;
}

BallSamples ball_samples(const Grid& grid, const Dilation& d, const DilatedBall& ball, int s)
{
    return ball_samples(grid, d, ball, s, ball_points(grid, d, ball));
}

BallSamples ball_samples(const Grid& grid, const Dilation& d, const DilatedBall& ball, int s,
                         std::vector<std::size_t> points)
{
    const int n = grid.dim();
    BallSamples bs;
    bs.ball = ball;
    bs.s = s;
    bs.points = std::move(points);
    bs.cell_volume = grid.cell_volume();
    auto idx = multi_indices(n, s);
    const Matrix& to_local = d.power(-ball.scale);
    bs.basis.resize(static_cast<Eigen::Index>(bs.points.size()), static_cast<Eigen::Index>(idx.size()));
    Vector x(n);
    for (std::size_t i = 0; i < bs.points.size(); ++i) {
        grid.point(bs.points[i], x.data());
        Vector u = to_local * (x - ball.center);
        for (std::size_t j = 0; j < idx.size(); ++j)
            bs.basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = monomial(u, idx[j]);
    }
    return bs;
}

Polynomial minimizing_polynomial(const GridFunction& f, const Dilation& d, const DilatedBall& ball, int s)
{
    return minimizing_polynomial(f, d, ball_samples(f.grid(), d, ball, s));
}

Polynomial minimizing_polynomial(const GridFunction& f, const Dilation& d, const BallSamples& bs)
{
    const Eigen::Index m = bs.basis.cols();
    const Eigen::Index np = bs.basis.rows();
    if (np < m)
        fail(ErrorCode::InsufficientSamples, std::to_string(np) + " lattice points for " + std::to_string(m) +
                                                 " coefficients");
    Vector vals(np);
    for (Eigen::Index i = 0; i < np; ++i)
        vals[i] = f[bs.points[static_cast<std::size_t>(i)]];
    Matrix gram = bs.cell_volume * (bs.basis.transpose() * bs.basis);
    Vector rhs = bs.cell_volume * (bs.basis.transpose() * vals);
    Eigen::LLT<Matrix> llt(gram);
    Vector coeffs;
    if (llt.info() == Eigen::Success)
        coeffs = llt.solve(rhs);
    if (llt.info() != Eigen::Success || !coeffs.allFinite()) {
        Matrix ridged = gram + 1e-12 * gram.trace() * Matrix::Identity(m, m);
        Eigen::LLT<Matrix> llt2(ridged);
        if (llt2.info() != Eigen::Success)
            fail(ErrorCode::SingularGram, "Gram matrix not positive definite after ridge");
        coeffs = llt2.solve(rhs);
        if (!coeffs.allFinite())
            fail(ErrorCode::SingularGram, "non-finite projection coefficients");
    }
    return Polynomial::in_ball(d, bs.ball, bs.s, coeffs);
}

double lq_error(const GridFunction& f, const BallSamples& bs, const Vector& coeffs, double q)
{
    Vector fit = bs.basis * coeffs;
    std::vector<double> r(bs.points.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = f[bs.points[i]] - fit[static_cast<Eigen::Index>(i)];
    return lq_sum(r, q) * bs.cell_volume;
}

LqFit refine_lq(const GridFunction& f, const Dilation& d, const BallSamples& bs, double q, int sweeps)
{
    LqFit out;
    out.projection = minimizing_polynomial(f, d, bs);
    out.refined = out.projection;
    out.projection_error = lq_error(f, bs, out.projection.coefficients(), q);
    out.refined_error = out.projection_error;
    if (q == 2.0 || bs.points.empty())
        return out;

    const std::size_t np = bs.points.size();
    const Eigen::Index m = bs.basis.cols();
    Vector coeffs = out.projection.coefficients();
    std::vector<double> resid(np), trial(np);
    Vector fit = bs.basis * coeffs;
    for (std::size_t i = 0; i < np; ++i)
        resid[i] = f[bs.points[i]] - fit[static_cast<Eigen::Index>(i)];
    double best = lq_sum(resid, q);

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        const double start = best;
        for (Eigen::Index j = 0; j < m; ++j) {
            auto col = bs.basis.col(j);
            double cmax = col.cwiseAbs().maxCoeff();
            if (cmax == 0)
                continue;
            auto energy = [&](double t) {
                for (std::size_t i = 0; i < np; ++i)
                    trial[i] = resid[i] - t * col[static_cast<Eigen::Index>(i)];
                return lq_sum(trial, q);
            };
            double rmax = 0;
            for (double v : resid)
                rmax = std::max(rmax, std::abs(v));
            double delta = 1e-3 * rmax / cmax;
            if (delta == 0)
                continue;
            double e0 = best;
            double ep = energy(delta), em = energy(-delta);
            double lo = -delta, hi = delta;
            if (ep >= e0 && em >= e0) {
                lo = -delta;
                hi = delta;
            } else {
                double dir = ep < em ? 1.0 : -1.0;
                double prev = 0, cur = dir * delta, ecur = std::min(ep, em);
                for (int it = 0; it < 200; ++it) {
                    double next = cur * 2.0;
                    double en = energy(next);
                    if (en >= ecur) {
                        lo = std::min(prev, next);
                        hi = std::max(prev, next);
                        break;
                    }
                    prev = cur;
                    cur = next;
                    ecur = en;
                    lo = std::min(prev, cur);
                    hi = std::max(prev, cur);
                }
            }
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double a = lo, b = hi;
            double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
            double f1 = energy(x1), f2 = energy(x2);
            for (int it = 0; it < 60 && b - a > 1e-15 * (std::abs(a) + std::abs(b) + 1e-300); ++it) {
                if (f1 < f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - gr * (b - a);
                    f1 = energy(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + gr * (b - a);
                    f2 = energy(x2);
                }
            }
            double t = f1 < f2 ? x1 : x2;
            double et = std::min(f1, f2);
            if (et < best) {
                best = et;
                coeffs[j] += t;
                for (std::size_t i = 0; i < np; ++i)
                    resid[i] -= t * col[static_cast<Eigen::Index>(i)];
            }
        }
        out.sweeps = sweep + 1;
        if (start - best <= 1e-13 * start)
            break;
    }
    // recompute from coefficients so the reported error matches the polynomial exactly
    double refined = lq_error(f, bs, coeffs, q);
    if (refined < out.projection_error) {
        out.refined = Polynomial::in_ball(d, bs.ball, bs.s, coeffs);
        out.refined_error = refined;
    }
    return out;
}

std::vector<double> moments(const GridFunction& f, const std::vector<std::size_t>& region, int s)
{
    const Grid& g = f.grid();
    auto idx = multi_indices(g.dim(), s);
    std::vector<double> out(idx.size(), 0.0);
    Vector x(g.dim());
    for (std::size_t i : region) {
        if (f[i] == 0.0)
            continue;
        g.point(i, x.data());
        for (std::size_t j = 0; j < idx.size(); ++j)
            out[j] += f[i] * monomial(x, idx[j]);
    }
    for (auto& v : out)
        v *= g.cell_volume();
    return out;
}

std::vector<double> moments(const GridFunction& f, int s)
{
    std::vector<std::size_t> all(f.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        all[i] = i;
    return moments(f, all, s);
}

std::vector<double> moments(const GridFunction& f, const Dilation& d, const DilatedBall& ball, int s)
{
    return moments(f, ball_points(f.grid(), d, ball), s);
}

std::vector<double> local_moments(const GridFunction& f, const Dilation& d, const DilatedBall& ball, int s)
{
    BallSamples bs = ball_samples(f.grid(), d, ball, s);
    std::vector<double> out(static_cast<std::size_t>(bs.basis.cols()), 0.0);
    for (std::size_t i = 0; i < bs.points.size(); ++i)
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] += f[bs.points[i]] * bs.basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    for (auto& v : out)
        v *= bs.cell_volume;
    return out;
}

}  // namespace anivar
