#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "anivar/grid.hpp"
#include "anivar/stencil.hpp"

namespace anivar {

using ComplexArray = std::vector<std::complex<double>>;

// In-place n-d DFT (row-major, last axis fastest). Unnormalised in both directions.
void fft(ComplexArray& data, const std::vector<int>& dims, bool inverse);

int fft_friendly_size(int n);

// Zero-padded periodic domain covering a grid; frequencies in cycles per unit length.
class SpectralDomain {
public:
    SpectralDomain(const Grid& grid, const std::vector<int>& padded);
    static SpectralDomain padded(const Grid& grid, int factor);

    const Grid& grid() const { return grid_; }
    const std::vector<int>& dims() const { return dims_; }
    std::size_t size() const { return size_; }
    double frequency(int axis, int m) const;
    void frequency(std::size_t flat, double* xi) const;

    ComplexArray forward(const GridFunction& f) const;
    // Real part of the inverse transform restricted to the grid box.
    GridFunction inverse(ComplexArray spec) const;
    // f * m applied in frequency: multiplier evaluated at each discrete frequency.
    GridFunction apply(const ComplexArray& fhat, const std::vector<double>& multiplier) const;

private:
    Grid grid_;
    std::vector<int> dims_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 1;
};

// sum_v f(x - v) w_v * cell_volume via a padded FFT.
GridFunction fft_convolve(const GridFunction& f, const Stencil& st, const std::vector<double>& w);

}  // namespace anivar
