#pragma once

#include <cstddef>
#include <vector>

#include "anivar/dilation.hpp"
#include "anivar/exponent.hpp"
#include "anivar/grid.hpp"
#include "anivar/scale_function.hpp"

namespace anivar {

// A(G)(x) = [sum_l b^-l sum_{y in x + B_l} |G(y,l)|^2 h]^{1/2} over the window of G.
GridFunction lusin_area(const ScaleFunction& G, const Dilation& d);

// y + B_l inside the closure of the ball.
bool tent_contains(const Dilation& d, const DilatedBall& ball, const Vector& y, int l);

// max over k in [k_min, k_max] and centres y on the half-step lattice (midpoints and vertices) with
// x in y + B_k of the average of |f| on y + B_k.
// Averages divide by |B_k| = b^k and count points off the grid as zero.
GridFunction hl_maximal(const GridFunction& f, const Dilation& d, int k_min, int k_max);

struct DecompositionOptions {
    double gamma = 0.5;
    double leakage_bound = 0.01;
};

struct TentAtom {
    int level = 0;        // j
    int cover_index = 0;  // k within the level
    DilatedBall ball;     // cover ball after enlargement
    int enlargement = 0;  // scales added so every node lies in the continuous tent
    double lambda = 0;          // 2^{j + e}, e = ceil(log2 ||1_B||), so lambda * atom reproduces G exactly
    double lambda_nominal = 0;  // 2^j ||1_B||
    std::vector<std::size_t> nodes;  // ScaleFunction node indices of C_{j,k}
    std::vector<double> values;      // atom values on those nodes

    ScaleFunction dense(const ScaleFunction& shape) const;
};

struct TentAtomSet {
    Grid grid;
    int scale_min = 0;
    int scale_max = 0;
    std::vector<TentAtom> atoms;

    int level_min = 0;
    int level_max = 0;
    std::size_t nonzero_nodes = 0;
    std::size_t leaked_nodes = 0;
    double leakage_ratio = 0;            // leaked |G|^2 mass over total
    double reconstruction_residual = 0;  // max |sum lambda A - G| over covered nodes
    bool disjoint = true;
    bool support_ok = true;
    bool pointwise_ok = true;  // |A| <= 2^-j ||1_B||^-1 |G| on every node
    std::size_t sandwich_violations = 0;
    int max_overlap = 0;       // cover balls through one point, over levels
    double area_norm = 0;      // ||A(G)||_{L^p(.)}
    double coefficient_norm = 0;  // aggregate norm of (ball, lambda_nominal), eta = min(p_-,1)
    double bound_constant = 0;    // coefficient_norm / area_norm

    ScaleFunction reconstruct() const;
};

TentAtomSet tent_atomic_decomposition(const ScaleFunction& G, const Exponent& p, const Dilation& d,
                                      const DecompositionOptions& opt = {});

struct TentAtomValidation {
    bool support_ok = true;
    std::size_t outside_nodes = 0;
    std::vector<double> qs;
    std::vector<double> sizes;  // ||A(a)||_{L^q}
    std::vector<double> bounds; // |B|^{1/q} / ||1_B||
    bool size_ok = true;
    bool infinity_atom = true;  // support and every listed q pass
};

TentAtomValidation tent_atom_validate(const ScaleFunction& a, const DilatedBall& ball, const std::vector<double>& qs,
                                      const Exponent& p, const Dilation& d);

}  // namespace anivar
