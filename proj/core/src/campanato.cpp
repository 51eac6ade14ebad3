#include "anivar/campanato.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "anivar/error.hpp"

namespace anivar {

void CampanatoParams::validate() const
{
    if (!(q >= 1) || !std::isfinite(q))
        fail(ErrorCode::InvalidArgument, "q must be a finite real >= 1");
    if (s < 0)
        fail(ErrorCode::InvalidArgument, "s must be nonnegative");
    if (!(eta > 0))
        fail(ErrorCode::InvalidArgument, "eta must be positive");
    if (!(epsilon > 0))
        fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (r_aux < 0 || (r_aux > 0 && r_aux >= p.underline_p()))
        fail(ErrorCode::InvalidArgument, "auxiliary r must lie in (0, min(1, p_-))");
}

int minimal_degree(const Dilation& d, double p_minus)
{
    double v = (1.0 / p_minus - 1.0) * std::log(d.b()) / std::log(d.lambda_minus());
    return std::max(0, static_cast<int>(std::floor(v)));
}

namespace {

}  // namespace

double aggregate_parts(const Exponent& p, double eta,
                       const std::vector<std::pair<const std::vector<std::size_t>*, double>>& parts)
{
    const Grid& grid = p.grid();
    // parts: (lattice points of a ball, lambda / ||1_B||)
    std::size_t positive = 0;
    for (const auto& [pts, c] : parts) {
        if (c > 0)
            ++positive;
    }
    if (positive == 0)
        return 0;
    std::vector<double> acc(grid.size(), 0.0);
    std::vector<std::size_t> touched;
    for (const auto& [pts, c] : parts) {
        if (c <= 0)
            continue;
        double v = std::pow(c, eta);
        for (std::size_t i : *pts) {
            if (acc[i] == 0)
                touched.push_back(i);
            acc[i] += v;
        }
    }
    std::sort(touched.begin(), touched.end());
    std::vector<double> vals(touched.size()), exps(touched.size());
    for (std::size_t t = 0; t < touched.size(); ++t) {
        vals[t] = std::pow(acc[touched[t]], 1.0 / eta);
        exps[t] = p[touched[t]];
    }
    return luxemburg_sparse(vals, exps, grid.cell_volume()).norm;
}

namespace {

std::size_t single_positive(const BallConfiguration& config)
{
    std::size_t idx = config.entries.size();
    for (std::size_t j = 0; j < config.entries.size(); ++j) {
        if (config.entries[j].weight > 0) {
            if (idx != config.entries.size())
                return config.entries.size();
            idx = j;
        }
    }
    return idx;
}

}  // namespace

double aggregate_norm(const BallConfiguration& config, const Dilation& d, const Exponent& p, double eta)
{
    if (!config.valid())
        fail(ErrorCode::InvalidArgument, "configuration needs a positive weight and no negative ones");
    std::size_t one = single_positive(config);
    if (one < config.entries.size()) {
        // homogeneity of the norm: lambda * ||1_B|| / ||1_B||
        return config.entries[one].weight;
    }
    std::vector<std::vector<std::size_t>> pts;
    pts.reserve(config.entries.size());
    std::vector<std::pair<const std::vector<std::size_t>*, double>> parts;
    for (const auto& e : config.entries) {
        pts.push_back(ball_points(p.grid(), d, e.ball));
        if (pts.back().empty())
            fail(ErrorCode::EmptyMask, "ball contains no lattice point");
    }
    for (std::size_t j = 0; j < pts.size(); ++j) {
        double w = config.entries[j].weight;
        parts.emplace_back(&pts[j], w > 0 ? w / indicator_norm(pts[j], p) : 0.0);
    }
    return aggregate_parts(p, eta, parts);
}

ClassicValue classic_functional(const GridFunction& f, const Dilation& d, const DilatedBall& ball, const Exponent& p,
                                double q, int s)
{
    CampanatoParams prm;
    prm.p = p;
    prm.q = q;
    prm.s = s;
    CampanatoEvaluator ev(f, d, prm);
    double scale = ball_volume(d, ball) / ev.indicator_norm(ball);
    return {scale * ev.oscillation(ball), scale * ev.refined_oscillation(ball)};
}

std::size_t CampanatoEvaluator::KeyHash::operator()(const Key& k) const
{
    std::size_t h = std::hash<int>()(k.scale);
    for (long long v : k.center_bits)
        h ^= std::hash<long long>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

CampanatoEvaluator::CampanatoEvaluator(const GridFunction& f, const Dilation& d, CampanatoParams prm)
    : f_(f), d_(d), prm_(std::move(prm))
{
    prm_.validate();
    if (prm_.p.grid() != f_.grid())
        fail(ErrorCode::InvalidArgument, "exponent and function live on different grids");
}

CampanatoEvaluator::BallData& CampanatoEvaluator::data(const DilatedBall& ball)
{
    Key key{ball.scale, {}};
    for (int a = 0; a < ball.center.size(); ++a)
        key.center_bits.push_back(std::bit_cast<long long>(ball.center[a]));
    auto it = cache_.find(key);
    if (it != cache_.end())
        return it->second;
    BallData bd;
    bd.points = ball_points(f_.grid(), d_, ball);
    if (bd.points.empty())
        fail(ErrorCode::EmptyMask, "ball contains no lattice point");
    return cache_.emplace(std::move(key), std::move(bd)).first->second;
}

CampanatoEvaluator::BallData& CampanatoEvaluator::fitted(const DilatedBall& ball)
{
    BallData& bd = data(ball);
    if (!bd.projection) {
        bd.samples = ball_samples(f_.grid(), d_, ball, prm_.s, bd.points);
        bd.projection = minimizing_polynomial(f_, d_, *bd.samples);
    }
    return bd;
}

double CampanatoEvaluator::indicator_norm(const DilatedBall& ball)
{
    BallData& bd = data(ball);
    if (bd.norm < 0)
        bd.norm = anivar::indicator_norm(bd.points, prm_.p);
    return bd.norm;
}

const Polynomial& CampanatoEvaluator::projection(const DilatedBall& ball)
{
    return *fitted(ball).projection;
}

double CampanatoEvaluator::oscillation(const DilatedBall& ball)
{
    BallData& bd = fitted(ball);
    if (bd.osc < 0) {
        double err = lq_error(f_, *bd.samples, bd.projection->coefficients(), prm_.q);
        bd.osc = std::pow(err / ball_volume(d_, ball), 1.0 / prm_.q);
    }
    return bd.osc;
}

double CampanatoEvaluator::refined_oscillation(const DilatedBall& ball)
{
    BallData& bd = fitted(ball);
    if (bd.refined < 0) {
        double osc = oscillation(ball);
        if (prm_.q == 2) {
            bd.refined = osc;
        } else {
            LqFit fit = refine_lq(f_, d_, *bd.samples, prm_.q);
            double r = std::pow(fit.refined_error / ball_volume(d_, ball), 1.0 / prm_.q);
            bd.refined = std::min(r, osc);
        }
    }
    return bd.refined;
}

double CampanatoEvaluator::l1_deviation(const DilatedBall& ball)
{
    BallData& bd = fitted(ball);
    if (bd.l1 < 0)
        bd.l1 = lq_error(f_, *bd.samples, bd.projection->coefficients(), 1.0);
    return bd.l1;
}

double CampanatoEvaluator::eps_integral(const DilatedBall& ball)
{
    BallData& bd = fitted(ball);
    if (bd.eps >= 0)
        return bd.eps;
    const Grid& g = f_.grid();
    const int n = g.dim();
    const double lb = std::log(d_.b());
    const double ll = std::log(d_.lambda_minus());
    const double eps = prm_.epsilon;
    const int l = ball.scale;
    const double num = eps * l * ll;
    const double first = l * lb + eps * l * ll;
    const Polynomial& P = *bd.projection;
    Vector x(n), diff(n);
    double sum = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.point(i, x.data());
        diff = x - ball.center;
        std::optional<int> k = d_.level(diff);
        double kern;
        if (!k) {
            kern = std::exp(num - first);
        } else {
            double second = *k * lb + eps * *k * ll;
            double m = std::max(first, second);
            kern = std::exp(num - m) / (std::exp(first - m) + std::exp(second - m));
        }
        sum += std::abs(f_[i] - P.evaluate(x)) * kern;
    }
    bd.eps = sum * g.cell_volume();
    return bd.eps;
}

double CampanatoEvaluator::combine(const BallConfiguration& config,
                                   const std::function<double(const ConfigEntry&)>& term)
{
    double agg = aggregate(config);
    if (!(agg > 0))
        fail(ErrorCode::ZeroDenominator, "aggregate norm vanishes");
    double sum = 0;
    for (const auto& e : config.entries) {
        if (e.weight > 0)
            sum += term(e);
    }
    return sum / agg;
}

double CampanatoEvaluator::aggregate(const BallConfiguration& config)
{
    if (!config.valid())
        fail(ErrorCode::InvalidArgument, "configuration needs a positive weight and no negative ones");
    std::size_t one = single_positive(config);
    if (one < config.entries.size())
        return config.entries[one].weight;
    std::vector<std::pair<const std::vector<std::size_t>*, double>> parts;
    for (const auto& e : config.entries) {
        if (e.weight > 0) {
            double nrm = indicator_norm(e.ball);
            parts.emplace_back(&data(e.ball).points, e.weight / nrm);
        }
    }
    return aggregate_parts(prm_.p, prm_.eta, parts);
}

double CampanatoEvaluator::functional(const BallConfiguration& config)
{
    return combine(config, [&](const ConfigEntry& e) {
        return e.weight * ball_volume(d_, e.ball) / indicator_norm(e.ball) * oscillation(e.ball);
    });
}

double CampanatoEvaluator::inf_functional(const BallConfiguration& config)
{
    return combine(config, [&](const ConfigEntry& e) {
        return e.weight * ball_volume(d_, e.ball) / indicator_norm(e.ball) * refined_oscillation(e.ball);
    });
}

double CampanatoEvaluator::l1_functional(const BallConfiguration& config)
{
    return combine(config,
                   [&](const ConfigEntry& e) { return e.weight / indicator_norm(e.ball) * l1_deviation(e.ball); });
}

double CampanatoEvaluator::eps_functional(const BallConfiguration& config)
{
    return combine(config, [&](const ConfigEntry& e) {
        return e.weight * ball_volume(d_, e.ball) / indicator_norm(e.ball) * eps_integral(e.ball);
    });
}

std::vector<double> CampanatoEvaluator::l1_summands(const BallConfiguration& config)
{
    std::vector<double> out;
    for (const auto& e : config.entries)
        out.push_back(e.weight > 0 ? e.weight / indicator_norm(e.ball) * l1_deviation(e.ball) : 0.0);
    return out;
}

std::vector<double> CampanatoEvaluator::eps_summands(const BallConfiguration& config)
{
    std::vector<double> out;
    for (const auto& e : config.entries) {
        out.push_back(e.weight > 0
                          ? e.weight * ball_volume(d_, e.ball) / indicator_norm(e.ball) * eps_integral(e.ball)
                          : 0.0);
    }
    return out;
}

bool CampanatoEvaluator::epsilon_admissible() const
{
    double r = prm_.aux();
    return prm_.epsilon > (2.0 / r - 1.0) * std::log(d_.b()) / std::log(d_.lambda_minus());
}

double campanato_type_functional(const GridFunction& f, const Dilation& d, const BallConfiguration& config,
                                 const CampanatoParams& prm)
{
    return CampanatoEvaluator(f, d, prm).functional(config);
}

double variant_inf_functional(const GridFunction& f, const Dilation& d, const BallConfiguration& config,
                              const CampanatoParams& prm)
{
    return CampanatoEvaluator(f, d, prm).inf_functional(config);
}

double variant_l1_functional(const GridFunction& f, const Dilation& d, const BallConfiguration& config,
                             const CampanatoParams& prm)
{
    return CampanatoEvaluator(f, d, prm).l1_functional(config);
}

double variant_eps_functional(const GridFunction& f, const Dilation& d, const BallConfiguration& config,
                              const CampanatoParams& prm)
{
    return CampanatoEvaluator(f, d, prm).eps_functional(config);
}

NormEstimate campanato_type_norm(const GridFunction& f, const Dilation& d, const CampanatoParams& prm,
                                 const SearchOptions& search)
{
    if (search.budget < 1)
        fail(ErrorCode::InvalidArgument, "search budget must be at least 1");
    CampanatoEvaluator ev(f, d, prm);
    auto candidates = candidate_balls(f.grid(), d, search);
    SearchResult r = search_configurations(candidates, search, [&](const BallConfiguration& c) {
        try {
            return ev.functional(c);
        } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    });
    return {r.value, r.argmax, r.best_single, r.evaluated};
}

double classic_norm(const GridFunction& f, const Dilation& d, const CampanatoParams& prm, const SearchOptions& search)
{
    CampanatoEvaluator ev(f, d, prm);
    double best = 0;
    for (const auto& ball : candidate_balls(f.grid(), d, search)) {
        try {
            best = std::max(best, ball_volume(d, ball) / ev.indicator_norm(ball) * ev.oscillation(ball));
        } catch (const Error&) {
        }
    }
    return best;
}

CountableReport countable_limit_check(const std::function<ConfigEntry(std::size_t)>& generator, std::size_t terms,
                                      const std::function<double(const BallConfiguration&)>& functional,
                                      double tolerance)
{
    CountableReport rep;
    BallConfiguration c;
    for (std::size_t m = 0; m < terms; ++m) {
        c.entries.push_back(generator(m));
        double v;
        try {
            v = functional(c);
        } catch (const Error&) {
            v = std::numeric_limits<double>::quiet_NaN();
        }
        rep.values.push_back(v);
    }
    if (rep.values.empty())
        return rep;
    const double last = rep.values.back();
    std::size_t from = terms - std::max<std::size_t>(1, terms / 10);
    for (std::size_t m = from; m < terms; ++m)
        rep.tail = std::max(rep.tail, std::abs(last - rep.values[m]));
    rep.stabilized_at = terms;
    while (rep.stabilized_at > 1 && rep.values[rep.stabilized_at - 2] == last)
        --rep.stabilized_at;
    rep.converged = std::isfinite(last) && rep.tail < tolerance;
    return rep;
}

}  // namespace anivar
