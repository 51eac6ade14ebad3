#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "anivar/campanato.hpp"
#include "anivar/convolution.hpp"
#include "anivar/dilation.hpp"
#include "anivar/exponent.hpp"
#include "anivar/hardy.hpp"
#include "anivar/scale_function.hpp"
#include "anivar/search.hpp"
#include "anivar/stencil.hpp"
#include "anivar/tent.hpp"

namespace anivar {

// Sum of mu(y,l) h over nodes with y + B_l inside the closed ball.
double tent_mass(const ScaleFunction& mu, const Dilation& d, const DilatedBall& ball);

// Caches tent masses and indicator norms per ball for repeated evaluation.
class CarlesonEvaluator {
public:
    CarlesonEvaluator(const ScaleFunction& mu, const Exponent& p, const Dilation& d, double eta);

    double mass(const DilatedBall& ball);
    double indicator_norm(const DilatedBall& ball);
    double term(const ConfigEntry& e);  // lambda |B|^{1/2} / ||1_B|| * mass^{1/2}
    double functional(const BallConfiguration& config);

private:
    struct BallData {
        std::vector<std::size_t> points;
        double norm = -1;
        double mass = -1;
    };
    BallData& data(const DilatedBall& ball);

    const ScaleFunction& mu_;
    Exponent p_;
    const Dilation& d_;
    double eta_;
    StencilCache stencils_;
    std::map<std::pair<int, std::vector<double>>, BallData> cache_;
};

double carleson_value(const ScaleFunction& mu, const Exponent& p, const Dilation& d, double eta,
                      const BallConfiguration& config);

// Certified lower bound of the Carleson supremum; weight ascent is not used here.
NormEstimate carleson_functional(const ScaleFunction& mu, const Exponent& p, const Dilation& d, double eta,
                                 const SearchOptions& search);

// phi = Laplacian^m of (1 - |x|^2/R^2)_+^K, radial, supported in the Euclidean ball of radius R inside B_0.
struct AnalyzingFunction {
    GridFunction phi;
    int s = 0;
    int m = 1;
    int K = 10;
    double radius = 0;
    std::vector<double> coefficients;  // phi(x) = sum_j c_j (|x|^2)^j for |x| < R
    std::vector<double> moments;       // discrete moments of order <= s, global coordinates
    double max_moment = 0;
    double annulus_inner = 0;  // (2 ||A||_F)^{-1}
    double annulus_outer = 1;
    double fourier_bound = 0;  // min |phi^| over the sampled annulus
    int annulus_samples = 0;
    int attempts = 0;

    double operator()(const Vector& x) const;
    // Radial Fourier transform with the e^{-2 pi i x xi} convention.
    double fourier(double omega) const;
    double fourier(const Vector& xi) const { return fourier(xi.norm()); }
    Kernel kernel() const;

    std::vector<double> table;  // phi^ on [0, table_max]
    double table_step = 0;
    double table_max = 0;
};

AnalyzingFunction build_analyzing_function(const Grid& grid, const Dilation& d, int s);

// Multiplier of the partner psi: phi^(xi) / sum_{|k| <= cap} phi^((A^T)^k xi)^2.
double calderon_multiplier(const AnalyzingFunction& phi, const Dilation& d, const Vector& xi);

// density(y,l) = |phi_{-l} * b(y)|^2; nodes whose kernel support leaves the box are set to 0.
ScaleFunction carleson_from_function(const GridFunction& b, const AnalyzingFunction& phi, const Dilation& d,
                                     int scale_min, int scale_max);
ScaleFunction carleson_from_function(const GridFunction& b, const GridFunction& phi, const Dilation& d,
                                     int scale_min, int scale_max, int vanishing_moments = -1);

struct CarlesonDualityOptions {
    int scale_min = -3;
    int scale_max = 2;
    int pad_factor = 2;
    double gamma = 0.5;
    double leakage_bound = 1.0;  // leaked mass enters the chain explicitly
    double drop_relative = 1e-14;  // |G| below this fraction of max |G| is treated as leaked
};

struct CarlesonDualityReport {
    double direct = 0;      // integral of f b
    double reproduced = 0;  // sum_l integral (psi_{-l} * f)(phi_{-l} * b)
    double defect = 0;
    double s0 = 0;  // |sum G H h|
    double s1 = 0;  // sum |G||H| h
    double s2 = 0;  // sum over atoms lambda sum_C |A||H| h
    double leak = 0;  // sum over leaked nodes |G||H| h
    double s3 = 0;  // sum lambda (sum_C |A|^2 h)^{1/2} (tent mass)^{1/2}
    double s4 = 0;  // sum lambda ||A(a)||_{L^2} (tent mass)^{1/2}, reported only
    double slack_triangle = 0;
    double slack_split = 0;
    double slack_cauchy = 0;
    std::size_t atoms = 0;
    double leakage_ratio = 0;

    double min_slack() const;
    bool holds(double tol = 1e-8) const { return min_slack() >= -tol; }
};

CarlesonDualityReport carleson_duality_check(const FiniteAtomicRep& f_rep, const GridFunction& b,
                                             const AnalyzingFunction& phi, const Dilation& d, const Exponent& p,
                                             const CarlesonDualityOptions& opt = {});

}  // namespace anivar
