#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "anivar/dilation.hpp"
#include "anivar/exponent.hpp"
#include "anivar/grid.hpp"
#include "anivar/polynomial.hpp"
#include "anivar/search.hpp"

namespace anivar {

struct CampanatoParams {
    Exponent p;
    double q = 1;
    int s = 0;
    double eta = 1;
    double epsilon = 1;
    double r_aux = 0;  // 0 means underline_p / 2

    double aux() const { return r_aux > 0 ? r_aux : p.underline_p() / 2; }
    void validate() const;
};

// Smallest admissible polynomial degree floor((1/p_- - 1) ln b / ln lambda_-), clamped at 0.
int minimal_degree(const Dilation& d, double p_minus);

double aggregate_norm(const BallConfiguration& config, const Dilation& d, const Exponent& p, double eta);

// Luxemburg norm of (sum_i c_i^eta 1_{S_i})^{1/eta} for lattice point sets S_i and coefficients c_i >= 0.
double aggregate_parts(const Exponent& p, double eta,
                       const std::vector<std::pair<const std::vector<std::size_t>*, double>>& parts);

struct ClassicValue {
    double value = 0;    // with the L2 projection
    double refined = 0;  // with the coordinate-descent L^q fit
};

ClassicValue classic_functional(const GridFunction& f, const Dilation& d, const DilatedBall& ball, const Exponent& p,
                                double q, int s);

// Per-ball quantities are cached, so one evaluator serves many configurations of the same f.
class CampanatoEvaluator {
public:
    CampanatoEvaluator(const GridFunction& f, const Dilation& d, CampanatoParams prm);

    const GridFunction& function() const { return f_; }
    const Dilation& dilation() const { return d_; }
    const CampanatoParams& params() const { return prm_; }

    double indicator_norm(const DilatedBall& ball);
    // (avg_B |f - P|^q)^{1/q} with the projection, resp. the refined inf.
    double oscillation(const DilatedBall& ball);
    double refined_oscillation(const DilatedBall& ball);
    // integral over B of |f - P| with the projection
    double l1_deviation(const DilatedBall& ball);
    // integral over the grid box of the epsilon kernel against |f - P|
    double eps_integral(const DilatedBall& ball);
    const Polynomial& projection(const DilatedBall& ball);

    double aggregate(const BallConfiguration& config);
    double functional(const BallConfiguration& config);
    double inf_functional(const BallConfiguration& config);
    double l1_functional(const BallConfiguration& config);
    double eps_functional(const BallConfiguration& config);

    // unnormalized summands of the two variants, entry by entry
    std::vector<double> l1_summands(const BallConfiguration& config);
    std::vector<double> eps_summands(const BallConfiguration& config);

    // whether epsilon exceeds (2/r - 1) ln b / ln lambda_-
    bool epsilon_admissible() const;

private:
    struct BallData {
        std::vector<std::size_t> points;
        double norm = -1;
        std::optional<BallSamples> samples;
        std::optional<Polynomial> projection;
        double osc = -1;
        double refined = -1;
        double l1 = -1;
        double eps = -1;
    };
    struct Key {
        int scale;
        std::vector<long long> center_bits;
        bool operator==(const Key& o) const { return scale == o.scale && center_bits == o.center_bits; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const;
    };

    BallData& data(const DilatedBall& ball);
    BallData& fitted(const DilatedBall& ball);
    double combine(const BallConfiguration& config, const std::function<double(const ConfigEntry&)>& term);

    GridFunction f_;
    Dilation d_;
    CampanatoParams prm_;
    std::unordered_map<Key, BallData, KeyHash> cache_;
};

double campanato_type_functional(const GridFunction& f, const Dilation& d, const BallConfiguration& config,
                                 const CampanatoParams& prm);
double variant_inf_functional(const GridFunction& f, const Dilation& d, const BallConfiguration& config,
                              const CampanatoParams& prm);
double variant_l1_functional(const GridFunction& f, const Dilation& d, const BallConfiguration& config,
                             const CampanatoParams& prm);
double variant_eps_functional(const GridFunction& f, const Dilation& d, const BallConfiguration& config,
                              const CampanatoParams& prm);

struct NormEstimate {
    double value = 0;
    BallConfiguration argmax;
    double best_single = 0;
    std::size_t evaluated = 0;
};

// Certified lower bound of the supremum over configurations.
NormEstimate campanato_type_norm(const GridFunction& f, const Dilation& d, const CampanatoParams& prm,
                                 const SearchOptions& search);
// Max of the classic functional over the canonical single-ball sweep.
double classic_norm(const GridFunction& f, const Dilation& d, const CampanatoParams& prm, const SearchOptions& search);

struct CountableReport {
    std::vector<double> values;  // functional of the m-term prefix, m = 1..M
    double tail = 0;             // max |v_M - v_m| over the last tenth of the prefixes
    std::size_t stabilized_at = 0;  // first m from which the sequence is constant
    bool converged = false;
};

CountableReport countable_limit_check(const std::function<ConfigEntry(std::size_t)>& generator, std::size_t terms,
                                      const std::function<double(const BallConfiguration&)>& functional,
                                      double tolerance = 1e-6);

}  // namespace anivar
