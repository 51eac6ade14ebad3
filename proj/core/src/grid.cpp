#include "anivar/grid.hpp"

#include <cmath>

#include "anivar/error.hpp"

namespace anivar {

Grid::Grid(std::vector<double> lower, std::vector<double> upper, std::vector<int> resolution)
    : lower_(std::move(lower)), upper_(std::move(upper)), res_(std::move(resolution))
{
    if (lower_.empty() || lower_.size() != upper_.size() || lower_.size() != res_.size())
        fail(ErrorCode::InvalidArgument, "grid corner/resolution dimensions disagree");
    const int n = dim();
    h_.resize(n);
    stride_.resize(n);
    size_ = 1;
    cell_volume_ = 1;
    for (int a = 0; a < n; ++a) {
        if (res_[a] < 2)
            fail(ErrorCode::InvalidArgument, "grid resolution must be >= 2 per axis");
        if (!(upper_[a] > lower_[a]))
            fail(ErrorCode::InvalidArgument, "grid box has empty extent");
        h_[a] = (upper_[a] - lower_[a]) / res_[a];
        cell_volume_ *= h_[a];
        size_ *= static_cast<std::size_t>(res_[a]);
    }
    std::size_t s = 1;
    for (int a = n - 1; a >= 0; --a) {
        stride_[a] = s;
        s *= static_cast<std::size_t>(res_[a]);
    }
}

Grid Grid::cube(int n, double lo, double hi, int resolution)
{
    return Grid(std::vector<double>(n, lo), std::vector<double>(n, hi), std::vector<int>(n, resolution));
}

double Grid::box_volume() const
{
    double v = 1;
    for (int a = 0; a < dim(); ++a)
        v *= upper_[a] - lower_[a];
    return v;
}

void Grid::unflatten(std::size_t flat, int* idx) const
{
    for (int a = 0; a < dim(); ++a) {
        idx[a] = static_cast<int>(flat / stride_[a]);
        flat %= stride_[a];
    }
}

std::size_t Grid::flatten(const int* idx) const
{
    std::size_t f = 0;
    for (int a = 0; a < dim(); ++a)
        f += static_cast<std::size_t>(idx[a]) * stride_[a];
    return f;
}

void Grid::point(std::size_t flat, double* out) const
{
    for (int a = 0; a < dim(); ++a) {
        std::size_t i = flat / stride_[a];
        flat %= stride_[a];
        out[a] = coord(a, static_cast<long>(i));
    }
}

Vector Grid::point(std::size_t flat) const
{
    Vector x(dim());
    point(flat, x.data());
    return x;
}

long Grid::nearest_index(int axis, double x) const
{
    return std::lround((x - lower_[axis]) / h_[axis] - 0.5);
}

bool Grid::operator==(const Grid& o) const
{
    return lower_ == o.lower_ && upper_ == o.upper_ && res_ == o.res_;
}

template <class T>
BasicGridFunction<T>::BasicGridFunction(const Grid& grid, std::vector<T> values)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.size())
        fail(ErrorCode::InvalidArgument, "value count does not match grid size");
}

template <class T>
BasicGridFunction<T>& BasicGridFunction<T>::operator+=(const BasicGridFunction& o)
{
    if (o.grid_ != grid_)
        fail(ErrorCode::InvalidArgument, "grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i)
        values_[i] += o.values_[i];
    return *this;
}

template <class T>
BasicGridFunction<T>& BasicGridFunction<T>::operator-=(const BasicGridFunction& o)
{
    if (o.grid_ != grid_)
        fail(ErrorCode::InvalidArgument, "grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i)
        values_[i] -= o.values_[i];
    return *this;
}

template <class T>
BasicGridFunction<T>& BasicGridFunction<T>::operator*=(T c)
{
    for (auto& v : values_)
        v *= c;
    return *this;
}

template class BasicGridFunction<double>;
template class BasicGridFunction<std::complex<double>>;

GridFunction operator+(GridFunction a, const GridFunction& b)
{
    a += b;
    return a;
}

GridFunction operator-(GridFunction a, const GridFunction& b)
{
    a -= b;
    return a;
}

GridFunction operator*(double c, GridFunction a)
{
    a *= c;
    return a;
}

GridFunction sample(const Grid& grid, const std::function<double(const Vector&)>& f)
{
    GridFunction out(grid);
    Vector x(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.point(i, x.data());
        out[i] = f(x);
    }
    return out;
}

GridFunction abs(const GridFunction& f)
{
    GridFunction out = f;
    for (auto& v : out.values())
        v = std::abs(v);
    return out;
}

double max_abs(const GridFunction& f)
{
    double m = 0;
    for (double v : f.values())
        m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(const GridFunction& f)
{
    for (double v : f.values())
        if (!std::isfinite(v))
            return false;
    return true;
}

double integrate(const GridFunction& f)
{
    double s = 0;
    for (double v : f.values())
        s += v;
    return s * f.grid().cell_volume();
}

std::complex<double> integrate(const ComplexGridFunction& f)
{
    std::complex<double> s = 0;
    for (const auto& v : f.values())
        s += v;
    return s * f.grid().cell_volume();
}

std::vector<std::size_t> ball_points(const Grid& grid, const Dilation& d, const DilatedBall& ball)
{
    const int n = grid.dim();
    if (d.dim() != n)
        fail(ErrorCode::InvalidArgument, "dilation and grid dimensions differ");
    Vector ext = d.half_extent(ball.scale);
    std::vector<long> lo(n), hi(n);
    for (int a = 0; a < n; ++a) {
        lo[a] = std::max(0L, grid.nearest_index(a, ball.center[a] - ext[a]) - 1);
        hi[a] = std::min<long>(grid.resolution()[a] - 1, grid.nearest_index(a, ball.center[a] + ext[a]) + 1);
        if (lo[a] > hi[a])
            return {};
    }
    const Matrix& q = d.form(ball.scale);
    const double c = d.level_c();
    std::vector<std::size_t> out;
    std::vector<long> idx(lo);
    Vector v(n);
    while (true) {
        std::size_t flat = 0;
        for (int a = 0; a < n; ++a) {
            v[a] = grid.coord(a, idx[a]) - ball.center[a];
            flat += static_cast<std::size_t>(idx[a]) * grid.stride(a);
        }
        if (v.dot(q * v) < c)
            out.push_back(flat);
        int a = n - 1;
        while (a >= 0 && idx[a] == hi[a]) {
            idx[a] = lo[a];
            --a;
        }
        if (a < 0)
            break;
        ++idx[a];
    }
    return out;
}

GridFunction ball_indicator(const Grid& grid, const Dilation& d, const DilatedBall& ball)
{
    GridFunction out(grid);
    for (std::size_t i : ball_points(grid, d, ball))
        out[i] = 1.0;
    return out;
}

double integrate_on_ball(const GridFunction& f, const Dilation& d, const DilatedBall& ball)
{
    auto pts = ball_points(f.grid(), d, ball);
    if (pts.empty())
        fail(ErrorCode::EmptyMask, "no lattice point inside the ball");
    double s = 0;
    for (std::size_t i : pts)
        s += f[i];
    return s * f.grid().cell_volume();
}

GridFunction boundary_margin(const Grid& grid, double width)
{
    GridFunction out(grid);
    std::vector<double> x(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.point(i, x.data());
        bool ok = true;
        for (int a = 0; a < grid.dim() && ok; ++a)
            ok = x[a] - grid.lower()[a] >= width && grid.upper()[a] - x[a] >= width;
        out[i] = ok ? 1.0 : 0.0;
    }
    return out;
}

GridFunction boundary_margin(const GridFunction& f, double width)
{
    return boundary_margin(f.grid(), width);
}

}  // namespace anivar
