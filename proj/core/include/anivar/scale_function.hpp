#pragma once

#include <cstddef>
#include <vector>

#include "anivar/grid.hpp"

namespace anivar {

// G(y, l) on lattice points y and integer scales l in [scale_min, scale_max], scale-major storage.
class ScaleFunction {
public:
    ScaleFunction() = default;
    ScaleFunction(const Grid& grid, int scale_min, int scale_max, double fill = 0.0);

    const Grid& grid() const { return grid_; }
    int scale_min() const { return lmin_; }
    int scale_max() const { return lmax_; }
    int scale_count() const { return lmax_ - lmin_ + 1; }
    std::size_t size() const { return values_.size(); }
    std::size_t index(int l, std::size_t flat) const
    {
        return static_cast<std::size_t>(l - lmin_) * grid_.size() + flat;
    }
    int scale_of(std::size_t node) const { return lmin_ + static_cast<int>(node / grid_.size()); }
    std::size_t point_of(std::size_t node) const { return node % grid_.size(); }

    double& operator()(int l, std::size_t flat) { return values_[index(l, flat)]; }
    double operator()(int l, std::size_t flat) const { return values_[index(l, flat)]; }
    double* layer(int l) { return values_.data() + index(l, 0); }
    const double* layer(int l) const { return values_.data() + index(l, 0); }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool all_finite() const;
    bool same_shape(const ScaleFunction& o) const;
    ScaleFunction& operator*=(double c);

private:
    Grid grid_;
    int lmin_ = 0;
    int lmax_ = -1;
    std::vector<double> values_;
};

}  // namespace anivar
