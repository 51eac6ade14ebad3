#include "anivar/stencil.hpp"

#include <cmath>

namespace anivar {

namespace {

template <class Accept>
Stencil scan_box(const Grid& grid, const Vector& ext, int scale, Accept&& accept)
{
    const int n = grid.dim();
    Stencil st;
    st.dim = n;
    st.scale = scale;
    st.reach.assign(n, 0);
    std::vector<long> lim(n);
    for (int a = 0; a < n; ++a) {
        double cells = ext[a] / grid.spacing(a);
        lim[a] = std::min<long>(static_cast<long>(std::ceil(cells)) + 1, 4L * grid.resolution()[a]);
    }
    std::vector<long> v(n);
    for (int a = 0; a < n; ++a)
        v[a] = -lim[a];
    Vector x(n);
    while (true) {
        for (int a = 0; a < n; ++a)
            x[a] = static_cast<double>(v[a]) * grid.spacing(a);
        if (accept(x)) {
            for (int a = 0; a < n; ++a) {
                st.offsets.push_back(static_cast<int>(v[a]));
                st.reach[a] = std::max(st.reach[a], static_cast<int>(std::abs(v[a])));
            }
        }
        int a = n - 1;
        while (a >= 0 && v[a] == lim[a]) {
            v[a] = -lim[a];
            --a;
        }
        if (a < 0)
            break;
        ++v[a];
    }
    return st;
}

}  // namespace

Stencil ball_stencil(const Grid& grid, const Dilation& d, int k)
{
    const Matrix& q = d.form(k);
    const double c = d.level_c();
    return scan_box(grid, d.half_extent(k), k, [&](const Vector& x) { return x.dot(q * x) < c; });
}

Stencil shifted_ball_stencil(const Grid& grid, const Dilation& d, int k, const std::vector<int>& shift)
{
    const Matrix& q = d.form(k);
    const double c = d.level_c();
    Vector off(grid.dim());
    for (int a = 0; a < grid.dim(); ++a)
        off[a] = 0.5 * shift[a] * grid.spacing(a);
    return scan_box(grid, d.half_extent(k), k, [&](const Vector& x) {
        Vector v = x - off;
        return v.dot(q * v) < c;
    });
}

Stencil negated(const Stencil& st)
{
    Stencil out = st;
    for (int& v : out.offsets)
        v = -v;
    return out;
}

Stencil tent_stencil(const Grid& grid, const Dilation& d, int l, int k)
{
    if (l > k) {
        Stencil st;
        st.dim = grid.dim();
        st.scale = l;
        st.reach.assign(st.dim, 0);
        return st;
    }
    DilatedBall outer{Vector::Zero(grid.dim()), k};
    const Matrix& q = d.form(k);
    const double c = d.level_c();
    return scan_box(grid, d.half_extent(k), l, [&](const Vector& x) {
        if (!(x.dot(q * x) < c))
            return false;
        return ball_containment(d, DilatedBall{x, l}, outer);
    });
}

const Stencil& StencilCache::ball(int k)
{
    std::lock_guard<std::mutex> lock(mutex_);
    auto& slot = balls_[k];
    if (!slot)
        slot = std::make_unique<Stencil>(ball_stencil(grid_, d_, k));
    return *slot;
}

const Stencil& StencilCache::tent(int l, int k)
{
    std::lock_guard<std::mutex> lock(mutex_);
    auto& slot = tents_[{l, k}];
    if (!slot)
        slot = std::make_unique<Stencil>(tent_stencil(grid_, d_, l, k));
    return *slot;
}

bool stencil_inside(const Grid& grid, const int* base, const Stencil& st)
{
    for (int a = 0; a < grid.dim(); ++a) {
        if (base[a] - st.reach[a] < 0 || base[a] + st.reach[a] >= grid.resolution()[a])
            return false;
    }
    return true;
}

}  // namespace anivar
