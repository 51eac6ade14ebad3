#include "anivar/dilation.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "anivar/error.hpp"

namespace anivar {

double unit_ball_volume(int n)
{
    // V_n = 2 pi V_{n-2} / n, exact in the first two dimensions
    double v = n % 2 ? 2.0 : 1.0;
    for (int k = n % 2 ? 3 : 2; k <= n; k += 2)
        v *= 2.0 * std::numbers::pi / k;
    return v;
}

Dilation::Dilation(const Matrix& a, const DilationOptions& options)
    : a_(a), cap_(options.level_cap)
{
    if (a.rows() == 0 || a.rows() != a.cols())
        fail(ErrorCode::InvalidArgument, "dilation matrix must be square and nonempty");
    if (!a.allFinite())
        fail(ErrorCode::InvalidArgument, "dilation matrix has non-finite entries");
    const int n = dim();

    Eigen::EigenSolver<Matrix> es(a_);
    if (es.info() != Eigen::Success)
        fail(ErrorCode::NotExpansive, "eigenvalue computation failed");
    Eigen::VectorXcd ev = es.eigenvalues();
    double min_mod = INFINITY, max_mod = 0;
    for (int i = 0; i < n; ++i) {
        min_mod = std::min(min_mod, std::abs(ev[i]));
        max_mod = std::max(max_mod, std::abs(ev[i]));
    }
    if (!(min_mod > 1.0))
        fail(ErrorCode::NotExpansive, "min |eigenvalue| = " + std::to_string(min_mod) + " <= 1");

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(es.eigenvectors());
    auto sv = svd.singularValues();
    double cond = sv[n - 1] > 0 ? sv[0] / sv[n - 1] : INFINITY;
    diagonalizable_ = cond < 1e8;
    lambda_minus_ = min_mod;
    lambda_plus_ = max_mod;
    if (!diagonalizable_) {
        lambda_minus_ = std::max(min_mod * 0.999, 0.5 * (1.0 + min_mod));
        lambda_plus_ = max_mod * 1.001;
    }
    b_ = std::abs(a_.determinant());

    double s = std::min(std::max(std::sqrt(lambda_minus_), 1.05), 0.999 * lambda_minus_);
    if (!(s > 1.0))
        fail(ErrorCode::SeriesDivergence, "no expansion factor above 1 fits below lambda_minus");

    Matrix ainv = a_.inverse();
    Matrix m = Matrix::Identity(n, n);
    p_ = Matrix::Zero(n, n);
    double weight = 1.0;
    bool converged = false;
    int extra = 0;
    for (int k = 0; k < options.max_series_terms; ++k) {
        Matrix term = weight * (m.transpose() * m);
        if (!term.allFinite())
            break;
        Matrix next = p_ + term;
        const bool saturated = next == p_;
        p_ = next;
        series_terms_ = k + 1;
        // past the tolerance keep adding until the sum stops moving, so P carries no truncation error
        if (term.norm() < options.series_tolerance)
            converged = true;
        if (saturated || (converged && ++extra > 128))
            break;
        m = ainv * m;
        weight *= s * s;
    }
    if (!converged || !p_.allFinite())
        fail(ErrorCode::SeriesDivergence, "shape series did not reach the term tolerance");
    p_ = 0.5 * (p_ + p_.transpose());
    c_ = std::pow(p_.determinant(), 1.0 / n) / std::pow(unit_ball_volume(n), 2.0 / n);
    r_ = s;
    omega_ = static_cast<int>(std::ceil(std::log(2.0) / std::log(r_)));
    while (omega_ > 1 && std::pow(r_, omega_ - 1) >= 2.0)
        --omega_;
    while (std::pow(r_, omega_) < 2.0)
        ++omega_;

    const int kp = 2 * cap_ + 2;
    powers_.assign(2 * kp + 1, Matrix());
    powers_[kp] = Matrix::Identity(n, n);
    for (int k = 1; k <= kp; ++k) {
        powers_[kp + k] = a_ * powers_[kp + k - 1];
        powers_[kp - k] = ainv * powers_[kp - k + 1];
    }
    // b^k rounded once; products of integer b stay exact in long double far past the cap
    b_table_.assign(2 * kp + 1, 1.0);
    long double acc = 1;
    for (int k = 1; k <= kp; ++k) {
        acc *= b_;
        b_table_[kp + k] = static_cast<double>(acc);
        b_table_[kp - k] = static_cast<double>(1.0L / acc);
    }
    const int kf = cap_ + 1;
    forms_.assign(2 * kf + 1, Matrix());
    for (int k = -kf; k <= kf; ++k) {
        const Matrix& inv = power(-k);
        Matrix q = inv.transpose() * p_ * inv;
        forms_[k + kf] = 0.5 * (q + q.transpose());
    }

    Eigen::LLT<Matrix> llt(p_);
    chol_r_ = llt.matrixU();
    Matrix rinv = chol_r_.inverse();
    containment_.resize(kp + 1);
    for (int d = 0; d <= kp; ++d) {
        Matrix nmat = chol_r_ * power(-d) * rinv;
        Eigen::SelfAdjointEigenSolver<Matrix> se(nmat.transpose() * nmat);
        ContainmentCache& cc = containment_[d];
        cc.sigma = se.eigenvalues();
        cc.nv = nmat * se.eigenvectors();
        cc.ntr = cc.nv.transpose();
    }

    h_ = estimate_quasi_triangle(*this, options.quasi_triangle_pairs, options.quasi_triangle_seed);
}

const Matrix& Dilation::power(int k) const
{
    const int kp = 2 * cap_ + 2;
    if (k < -kp || k > kp)
        fail(ErrorCode::ScaleOverflow, "power index " + std::to_string(k) + " outside table");
    return powers_[k + kp];
}

const Matrix& Dilation::form(int k) const
{
    const int kf = cap_ + 1;
    if (k < -kf || k > kf)
        fail(ErrorCode::ScaleOverflow, "scale " + std::to_string(k) + " outside level cap");
    return forms_[k + kf];
}

double Dilation::b_power(int k) const
{
    const int kp = 2 * cap_ + 2;
    if (k < -kp || k > kp)
        fail(ErrorCode::ScaleOverflow, "b^k index " + std::to_string(k) + " outside table");
    return b_table_[k + kp];
}

double Dilation::quadratic(const Vector& v, int k) const
{
    return v.dot(form(k) * v);
}

Vector Dilation::half_extent(int k) const
{
    const Matrix& ak = power(k);
    Matrix qinv = ak * p_.inverse() * ak.transpose();
    Vector out(dim());
    for (int i = 0; i < dim(); ++i)
        out[i] = std::sqrt(c_ * qinv(i, i));
    return out;
}

double Dilation::inscribed_radius(int k) const
{
    Eigen::SelfAdjointEigenSolver<Matrix> se(form(k), Eigen::EigenvaluesOnly);
    return std::sqrt(c_ / se.eigenvalues().maxCoeff());
}

std::optional<int> Dilation::level(const Vector& x) const
{
    if (x.isZero(0.0))
        return std::nullopt;
    auto inside = [&](int k) { return quadratic(x, k) < c_; };
    if (!inside(cap_ + 1))
        fail(ErrorCode::ScaleOverflow, "point beyond the outermost level");
    if (inside(-cap_))
        fail(ErrorCode::ScaleOverflow, "point below the innermost level");
    int lo = -cap_, hi = cap_ + 1;  // inside(lo) false, inside(hi) true
    while (hi - lo > 1) {
        int mid = lo + (hi - lo) / 2;
        if (inside(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi - 1;
}

double Dilation::max_form_over_ball(int d, const Vector& t) const
{
    if (d > 0 || -d >= static_cast<int>(containment_.size()))
        fail(ErrorCode::ScaleOverflow, "containment scale gap outside table");
    const ContainmentCache& cc = containment_[-d];
    const int n = dim();
    const double sc = std::sqrt(c_);
    // sigma_i of M^T M with M = sqrt(c) N, g = V^T M^T t
    Vector sigma = c_ * cc.sigma;
    Vector g = sc * (cc.ntr * t);
    const double smax = sigma[n - 1];
    const double gnorm = g.norm();

    auto value = [&](const Vector& y) { return (t + sc * (cc.nv * y)).squaredNorm(); };
    auto secular = [&](double mu) {
        double acc = 0;
        for (int i = 0; i < n; ++i) {
            double den = mu - sigma[i];
            acc += g[i] * g[i] / (den * den);
        }
        return acc;
    };

    double best = -INFINITY;
    // hard case: top direction carries no linear term
    const double gap_tol = 1e-12 * std::max(1.0, smax);
    double tail = 0;
    bool top_zero = true;
    for (int i = 0; i < n; ++i) {
        if (sigma[i] >= smax - gap_tol) {
            if (std::abs(g[i]) > 1e-14 * std::max(1.0, gnorm))
                top_zero = false;
        } else {
            double den = smax - sigma[i];
            tail += g[i] * g[i] / (den * den);
        }
    }
    if (top_zero && tail <= 1.0) {
        Vector y = Vector::Zero(n);
        int top = n - 1;
        for (int i = 0; i < n; ++i)
            if (sigma[i] < smax - gap_tol)
                y[i] = g[i] / (smax - sigma[i]);
        y[top] = std::sqrt(std::max(0.0, 1.0 - tail));
        best = std::max(best, value(y));
        y[top] = -y[top];
        best = std::max(best, value(y));
    }
    if (gnorm > 0) {
        double lo = smax, hi = smax + gnorm;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            if (secular(mid) > 1.0)
                lo = mid;
            else
                hi = mid;
        }
        Vector y(n);
        for (int i = 0; i < n; ++i) {
            double den = hi - sigma[i];
            y[i] = den > 0 ? g[i] / den : 0.0;
        }
        double ny = y.norm();
        if (ny > 0)
            y /= ny;
        best = std::max(best, value(y));
    } else {
        Vector y = Vector::Zero(n);
        y[n - 1] = 1.0;
        best = std::max(best, value(y));
    }
    return best;
}

bool ball_contains(const Dilation& d, const DilatedBall& ball, const Vector& x)
{
    Vector v = x - ball.center;
    return d.quadratic(v, ball.scale) < d.level_c();
}

double ball_volume(const Dilation& d, const DilatedBall& ball)
{
    return d.b_power(ball.scale);
}

double step_quasi_norm(const Dilation& d, const Vector& x)
{
    auto k = d.level(x);
    return k ? d.b_power(*k) : 0.0;
}

bool ball_containment(const Dilation& d, const DilatedBall& inner, const DilatedBall& outer)
{
    if (inner.scale > outer.scale)
        return false;
    Vector t = d.cholesky_factor() * (d.power(-outer.scale) * (inner.center - outer.center));
    double m = d.max_form_over_ball(inner.scale - outer.scale, t);
    return m <= d.level_c() * (1.0 + 1e-12);
}

double monte_carlo_volume(const Dilation& d, int k, std::size_t samples, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector ext = d.half_extent(k);
    const Matrix& q = d.form(k);
    double box = 1.0;
    for (int i = 0; i < d.dim(); ++i)
        box *= 2.0 * ext[i];
    std::size_t hits = 0;
    Vector x(d.dim());
    for (std::size_t s = 0; s < samples; ++s) {
        for (int i = 0; i < d.dim(); ++i)
            x[i] = ext[i] * u(rng);
        if (x.dot(q * x) < d.level_c())
            ++hits;
    }
    return box * static_cast<double>(hits) / static_cast<double>(samples);
}

double estimate_quasi_triangle(const Dilation& d, std::size_t pairs, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> lev(-3, 3);
    Vector ext = d.half_extent(1);
    const int n = d.dim();
    double h = 0;
    Vector x(n), y(n);
    for (std::size_t s = 0; s < pairs; ++s) {
        const Matrix& ak = d.power(lev(rng));
        for (int i = 0; i < n; ++i)
            x[i] = ext[i] * u(rng);
        for (int i = 0; i < n; ++i)
            y[i] = ext[i] * u(rng);
        x = ak * x;
        y = ak * y;
        try {
            double rx = step_quasi_norm(d, x), ry = step_quasi_norm(d, y);
            if (rx + ry <= 0)
                continue;
            h = std::max(h, step_quasi_norm(d, x + y) / (rx + ry));
        } catch (const Error&) {
        }
    }
    return h;
}

}  // namespace anivar
