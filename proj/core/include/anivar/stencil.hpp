#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "anivar/dilation.hpp"
#include "anivar/grid.hpp"

namespace anivar {

// Integer lattice offsets v with (v * h) in B_k, stored packed (dim ints each).
struct Stencil {
    int dim = 0;
    int scale = 0;
    std::vector<int> offsets;
    std::vector<int> reach;  // max |v_a| per axis

    std::size_t count() const { return dim ? offsets.size() / dim : 0; }
    const int* offset(std::size_t i) const { return offsets.data() + i * dim; }
};

Stencil ball_stencil(const Grid& grid, const Dilation& d, int k);
// Offsets v with (v - shift/2) * h in B_k: the ball centred half a cell past the base point along
// every axis with shift[a] = 1.
Stencil shifted_ball_stencil(const Grid& grid, const Dilation& d, int k, const std::vector<int>& shift);
Stencil negated(const Stencil& st);

// Offsets v with (v*h) + B_l contained in closure(B_k); the tent of a lattice-centred ball.
Stencil tent_stencil(const Grid& grid, const Dilation& d, int l, int k);

// Thread-safe lazily filled cache of ball and tent stencils for one grid and dilation.
class StencilCache {
public:
    StencilCache(const Grid& grid, const Dilation& d) : grid_(grid), d_(d) {}
    const Stencil& ball(int k);
    const Stencil& tent(int l, int k);
    const Grid& grid() const { return grid_; }
    const Dilation& dilation() const { return d_; }

private:
    Grid grid_;
    const Dilation& d_;
    std::mutex mutex_;
    std::map<int, std::unique_ptr<Stencil>> balls_;
    std::map<std::pair<int, int>, std::unique_ptr<Stencil>> tents_;
};

// Visits flat indices of in-grid points base + v for v in the stencil.
template <class Fn>
void for_each_offset(const Grid& grid, const int* base, const Stencil& st, Fn&& fn)
{
    const int n = grid.dim();
    const auto& res = grid.resolution();
    for (std::size_t i = 0; i < st.count(); ++i) {
        const int* v = st.offset(i);
        std::size_t flat = 0;
        bool inside = true;
        for (int a = 0; a < n; ++a) {
            long j = static_cast<long>(base[a]) + v[a];
            if (j < 0 || j >= res[a]) {
                inside = false;
                break;
            }
            flat += static_cast<std::size_t>(j) * grid.stride(a);
        }
        if (inside)
            fn(flat, i);
    }
}

// True when every base + v lies inside the grid.
bool stencil_inside(const Grid& grid, const int* base, const Stencil& st);

}  // namespace anivar
