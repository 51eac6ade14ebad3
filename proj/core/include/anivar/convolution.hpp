#pragma once

#include <functional>
#include <vector>

#include "anivar/dilation.hpp"
#include "anivar/grid.hpp"
#include "anivar/stencil.hpp"

namespace anivar {

// Compactly supported kernel phi with supp phi inside B_{support_level}.
struct Kernel {
    std::function<double(const Vector&)> eval;
    int support_level = 0;
    // Moments of order <= vanishing_moments are zero; -1 when none are claimed.
    int vanishing_moments = -1;

    // Multilinear interpolation of sampled values (zero outside the sample box).
    static Kernel from_grid(const GridFunction& phi, const Dilation& d, int vanishing_moments = -1);
};

// phi_k(x) = b^k phi(A^k x) sampled on lattice offsets.
struct ScaledKernel {
    Stencil stencil;
    std::vector<double> weights;
    int k = 0;
};

ScaledKernel scale_kernel(const Kernel& phi, const Grid& grid, const Dilation& d, int k);

// sum_v f(x - v) w_v * cell_volume, direct for sparse work and FFT otherwise.
GridFunction convolve(const GridFunction& f, const ScaledKernel& kern);

GridFunction convolve_scaled(const GridFunction& f, const Kernel& phi, const Dilation& d, int k);
GridFunction convolve_scaled(const GridFunction& f, const GridFunction& kernel, const Dilation& d, int k);

}  // namespace anivar
