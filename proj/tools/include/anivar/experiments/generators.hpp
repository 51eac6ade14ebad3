#pragma once

#include <cstdint>
#include <random>

#include "anivar/campanato.hpp"
#include "anivar/hardy.hpp"
#include "anivar/polynomial.hpp"
#include "anivar/scale_function.hpp"

namespace anivar::experiments {

using Rng = std::mt19937_64;

// Independent stream per (seed, salt).
Rng stream(std::uint64_t seed, std::uint64_t salt);

// Desk grids: [-8, 8] in 1D, [-4, 4]^2 in 2D.
Grid desk_grid_1d(int resolution);
Grid desk_grid_2d(int resolution);

Matrix matrix_1d(double a);
Matrix matrix_diag(double a, double b);

// Four Gaussian bumps, a linear term and a ripple.
GridFunction random_smooth(const Grid& grid, std::uint64_t seed);

// Polynomial of degree <= s in global coordinates, coefficients uniform in [-range, range].
GridFunction random_polynomial(const Grid& grid, int s, Rng& rng, double range = 2.0);

// Lattice-centred ball at a random scale in [k_lo, k_hi] whose bounding box stays
// inside the grid box shrunk by margin on each side.
DilatedBall random_ball(const Grid& grid, const Dilation& d, int k_lo, int k_hi, Rng& rng, double margin = 0);

BallConfiguration random_configuration(const Grid& grid, const Dilation& d, int k_lo, int k_hi, int max_balls,
                                       Rng& rng);

// Smooth compactly supported bumps, one per scale, centres within |x| < reach / 2.
ScaleFunction random_scale_function(const Grid& grid, int lmin, int lmax, std::uint64_t seed, double reach = 2.0);

FiniteAtomicRep random_atomic_rep(const Grid& grid, const Dilation& d, const Exponent& p, double q, int s,
                                  int terms, std::uint64_t seed);

// sqrt(12) x on (-1/2, 1/2): the L^2-normalized atom on B_0 for A = [2], p = 1.
Atom sqrt12_atom(const Grid& grid, const Dilation& d);

}  // namespace anivar::experiments
