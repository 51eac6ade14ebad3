#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "anivar/campanato.hpp"
#include "anivar/dilation.hpp"
#include "anivar/exponent.hpp"
#include "anivar/grid.hpp"

namespace anivar {

struct AtomValidation {
    double outside_max = 0;     // max |a| off the ball
    double size = 0;            // ||a||_{L^r}
    double size_bound = 0;      // |B|^{1/r} / ||1_B||
    double moment_residual = 0; // max local moment / ||a||_{L^r}
    bool support_ok = false;
    bool size_ok = false;
    bool moments_ok = false;

    bool valid() const { return support_ok && size_ok && moments_ok; }
};

struct Atom {
    DilatedBall ball;
    GridFunction values;
    double r = 2;  // may be infinity
    int s = 0;
    AtomValidation validation;
};

AtomValidation validate_atom(const Atom& a, const Dilation& d, const Exponent& p, double size_tol = 1e-8,
                             double moment_tol = 1e-8);

// |B|^{1/q} (eta - P eta) 1_B / (||1_B|| ||eta - P eta||_{L^q(B)}), validated.
Atom make_atom(const GridFunction& seed, const Dilation& d, const DilatedBall& ball, double q, const Exponent& p,
               int s);

struct FiniteAtomicRep {
    std::vector<std::pair<double, Atom>> terms;

    GridFunction function() const;
    BallConfiguration configuration() const;
};

// Aggregate norm of the representation with eta = min(p_-, 1).
double finite_atomic_norm(const FiniteAtomicRep& rep, const Dilation& d, const Exponent& p);

// Largest k for which phi_k of a kernel supported in B_level still covers a cell on this grid.
int finest_resolvable_scale(const Grid& grid, const Dilation& d, int support_level);

// max over k in [k_lo, k_hi] of |f * phi_k|, zeroed within margin of the box boundary.
GridFunction radial_maximal(const GridFunction& f, const GridFunction& phi, const Dilation& d, int k_lo, int k_hi,
                            double margin = 0);
double hardy_norm_estimate(const GridFunction& f, const GridFunction& phi, const Exponent& p, const Dilation& d,
                           int k_lo, int k_hi, double margin = 0);

double dual_pairing(const GridFunction& f, const GridFunction& g);

struct AtomChainStep {
    double weight = 0;
    double pairing = 0;            // integral of a_j g
    double max_vanishing_gap = 0;  // max over sampled P of ||int a(g-P)| - |int a g||
    double holder_lhs = 0;         // |int a (g - P_j)|
    double holder_rhs = 0;         // ||a||_q ||g - P_j||_{q'}
    double bound_term = 0;         // |B|/||1_B|| (avg |g - P_j|^{q'})^{1/q'}
};

struct DualityChainReport {
    double pairing = 0;         // |Lambda_g(f)|
    double triangle_sum = 0;    // sum lambda_j |int a_j g|
    double holder_sum = 0;      // sum lambda_j ||a_j||_q ||g - P_j||_{q'}
    double bound = 0;           // sum lambda_j |B_j|/||1|| inf_P (avg |g-P|^{q'})^{1/q'}
    double campanato_value = 0; // functional of g at the rep's configuration (projection, q')
    double atomic_norm = 0;
    double ratio = 0;           // pairing / (campanato_value * atomic_norm)
    double slack_vanishing = 0;
    double slack_holder = 0;
    double slack_aggregation = 0;
    std::vector<AtomChainStep> steps;

    bool holds(double tol = 1e-8) const
    {
        return slack_vanishing >= -tol && slack_holder >= -tol && slack_aggregation >= -tol;
    }
};

// Chain |Lambda_g(f)| <= sum lambda_j |int a_j (g - P_j)| <= sum lambda_j ||a_j|| ||g - P_j||
// <= sum lambda_j |B_j|/||1|| inf_P(...) with constant 1 at each step. prm.q is the atoms' r.
DualityChainReport duality_chain_check(const FiniteAtomicRep& rep, const GridFunction& g, const Dilation& d,
                                       const CampanatoParams& prm, int polys_per_atom = 4,
                                       std::uint64_t seed = 11);

struct DilationInequalityReport {
    std::vector<double> values;  // L(k), k = 0..K
    double slope = 0;
    double bound = 0;
    bool holds = false;
    bool truncated = false;  // some enlarged ball left the grid box
};

DilationInequalityReport dilation_indicator_inequality(const BallConfiguration& config, const Dilation& d,
                                                       const Exponent& p, int max_k, double r_aux);

}  // namespace anivar
