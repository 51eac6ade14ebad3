#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "anivar/dilation.hpp"
#include "anivar/grid.hpp"

namespace anivar {

// Sampled log-Hoelder constants; a bounded-grid diagnostic only.
struct LogHolderReport {
    double c_log = 0;
    double c_inf = 0;
    double c_log_doubled = 0;
    double c_inf_doubled = 0;
    std::size_t pairs = 0;
    bool stable_under_doubling = true;
    // Growth of |p(x)-p(y)| log(e + 1/rho(x-y)) along nested pairs at the sharpest adjacent jump.
    double max_adjacent_jump = 0;
    double nested_growth = 0;
    bool unbounded_growth = false;
    bool stable = true;
    bool truncated = true;  // the decay at infinity is only seen on the bounded box
};

class Exponent {
public:
    Exponent() = default;
    Exponent(GridFunction values, double p_infinity);
    static Exponent constant(const Grid& grid, double q);

    const GridFunction& values() const { return *values_; }
    const Grid& grid() const { return values_->grid(); }
    double operator[](std::size_t i) const { return (*values_)[i]; }
    double p_minus() const { return p_minus_; }
    double p_plus() const { return p_plus_; }
    double p_infinity() const { return p_infinity_; }
    double underline_p() const { return std::min(p_minus_, 1.0); }
    bool is_constant() const { return p_minus_ == p_plus_; }
    const std::optional<LogHolderReport>& log_holder() const { return report_; }
    Exponent with_log_holder(const LogHolderReport& r) const;

private:
    std::shared_ptr<const GridFunction> values_;
    double p_minus_ = 0;
    double p_plus_ = 0;
    double p_infinity_ = 0;
    std::optional<LogHolderReport> report_;
};

struct LuxemburgResult {
    double norm = 0;
    double lower = 0;  // modular(f/lower) > 1
    double upper = 0;  // modular(f/upper) <= 1, equals norm
    int iterations = 0;
    double modular_at_norm = 0;
};

// Luxemburg norm of sparse data: |f_i| with exponents p_i, each weighted by cell_volume.
LuxemburgResult luxemburg_sparse(const std::vector<double>& absvals, const std::vector<double>& exps,
                                 double cell_volume);

double modular(const GridFunction& f, const Exponent& p);
double luxemburg_norm(const GridFunction& f, const Exponent& p);
LuxemburgResult luxemburg_solve(const GridFunction& f, const Exponent& p);
double indicator_norm(const Dilation& d, const DilatedBall& ball, const Exponent& p);
double indicator_norm(const std::vector<std::size_t>& points, const Exponent& p);

LogHolderReport check_log_holder(const Exponent& p, const Dilation& d, std::size_t sample_pairs,
                                 std::uint64_t seed = 7);
Exponent conjugate(const Exponent& p);

}  // namespace anivar
