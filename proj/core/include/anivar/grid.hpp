#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "anivar/dilation.hpp"

namespace anivar {

// Uniform lattice of cell midpoints over a box, last axis fastest.
class Grid {
public:
    Grid() = default;
    Grid(std::vector<double> lower, std::vector<double> upper, std::vector<int> resolution);
    static Grid cube(int n, double lo, double hi, int resolution);

    int dim() const { return static_cast<int>(res_.size()); }
    std::size_t size() const { return size_; }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    const std::vector<int>& resolution() const { return res_; }
    double spacing(int axis) const { return h_[axis]; }
    const std::vector<double>& spacings() const { return h_; }
    double cell_volume() const { return cell_volume_; }
    double box_volume() const;
    std::size_t stride(int axis) const { return stride_[axis]; }

    double coord(int axis, long i) const { return lower_[axis] + (static_cast<double>(i) + 0.5) * h_[axis]; }
    Vector point(std::size_t flat) const;
    void point(std::size_t flat, double* out) const;
    void unflatten(std::size_t flat, int* idx) const;
    std::size_t flatten(const int* idx) const;
    // Nearest lattice index along an axis, not clamped.
    long nearest_index(int axis, double x) const;
    bool in_range(int axis, long i) const { return i >= 0 && i < res_[axis]; }

    bool operator==(const Grid& o) const;
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    std::vector<double> lower_, upper_, h_;
    std::vector<int> res_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 0;
    double cell_volume_ = 0;
};

template <class T>
class BasicGridFunction {
public:
    using value_type = T;

    BasicGridFunction() = default;
    explicit BasicGridFunction(const Grid& grid, T fill = T{})
        : grid_(grid), values_(grid.size(), fill)
    {
    }
    BasicGridFunction(const Grid& grid, std::vector<T> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<T>& values() const { return values_; }
    std::vector<T>& values() { return values_; }
    T& operator[](std::size_t i) { return values_[i]; }
    const T& operator[](std::size_t i) const { return values_[i]; }

    BasicGridFunction& operator+=(const BasicGridFunction& o);
    BasicGridFunction& operator-=(const BasicGridFunction& o);
    BasicGridFunction& operator*=(T c);

private:
    Grid grid_;
    std::vector<T> values_;
};

using GridFunction = BasicGridFunction<double>;
using ComplexGridFunction = BasicGridFunction<std::complex<double>>;

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

GridFunction sample(const Grid& grid, const std::function<double(const Vector&)>& f);
GridFunction abs(const GridFunction& f);
double max_abs(const GridFunction& f);
bool all_finite(const GridFunction& f);

double integrate(const GridFunction& f);
std::complex<double> integrate(const ComplexGridFunction& f);
double integrate_on_ball(const GridFunction& f, const Dilation& d, const DilatedBall& ball);

// Flat indices of lattice points inside the ball (ascending).
std::vector<std::size_t> ball_points(const Grid& grid, const Dilation& d, const DilatedBall& ball);
GridFunction ball_indicator(const Grid& grid, const Dilation& d, const DilatedBall& ball);

GridFunction boundary_margin(const Grid& grid, double width);
GridFunction boundary_margin(const GridFunction& f, double width);

}  // namespace anivar
