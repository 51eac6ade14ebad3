#include "anivar/tent.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "anivar/campanato.hpp"
#include "anivar/error.hpp"
#include "anivar/fourier.hpp"
#include "anivar/parallel.hpp"
#include "anivar/stencil.hpp"

namespace anivar {

namespace {

constexpr double kScatterWork = 4e8;

// Offsets of a 1D stencil forming one run [lo, hi].
bool contiguous_1d(const Stencil& st, long& lo, long& hi)
{
    if (st.dim != 1 || st.count() == 0)
        return false;
    lo = hi = st.offsets[0];
    for (int v : st.offsets) {
        lo = std::min<long>(lo, v);
        hi = std::max<long>(hi, v);
    }
    return static_cast<long>(st.count()) == hi - lo + 1;
}

// out[x] = max_{lo <= v <= hi} in[x + v] over indices inside the array, 0 when none are.
std::vector<double> sliding_max(const std::vector<double>& in, long lo, long hi)
{
    const long n = static_cast<long>(in.size());
    std::vector<double> out(in.size(), 0.0);
    std::deque<long> q;
    long next = 0;
    for (long x = 0; x < n; ++x) {
        while (next < n && next <= x + hi) {
            while (!q.empty() && in[q.back()] <= in[next])
                q.pop_back();
            q.push_back(next++);
        }
        while (!q.empty() && q.front() < x + lo)
            q.pop_front();
        if (!q.empty())
            out[x] = in[q.front()];
    }
    return out;
}

bool inside_set(const Grid& grid, const std::vector<char>& set, std::size_t flat, const Stencil& st)
{
    std::vector<int> base(grid.dim());
    grid.unflatten(flat, base.data());
    if (!stencil_inside(grid, base.data(), st))
        return false;
    bool ok = true;
    for_each_offset(grid, base.data(), st, [&](std::size_t f, std::size_t) {
        if (!set[f])
            ok = false;
    });
    return ok;
}

}  // namespace

GridFunction lusin_area(const ScaleFunction& G, const Dilation& d)
{
    const Grid& grid = G.grid();
    const double h = grid.cell_volume();
    std::vector<double> acc(grid.size(), 0.0);
    for (int l = G.scale_min(); l <= G.scale_max(); ++l) {
        const double* layer = G.layer(l);
        std::vector<std::size_t> nz;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (layer[i] != 0)
                nz.push_back(i);
        }
        if (nz.empty())
            continue;
        const double w = d.b_power(-l) * h;
        Stencil st = ball_stencil(grid, d, l);
        const double work = static_cast<double>(nz.size()) * static_cast<double>(st.count());
        if (work <= kScatterWork) {
            std::vector<int> base(grid.dim());
            for (std::size_t y : nz) {
                const double v = w * layer[y] * layer[y];
                grid.unflatten(y, base.data());
                // B_l is symmetric, so {x : y in x + B_l} = y + B_l.
                for_each_offset(grid, base.data(), st, [&](std::size_t x, std::size_t) { acc[x] += v; });
            }
        } else {
            GridFunction sq(grid);
            double mx = 0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                sq[i] = layer[i] * layer[i];
                mx = std::max(mx, sq[i]);
            }
            GridFunction c = fft_convolve(sq, st, std::vector<double>(st.count(), 1.0));
            const double floor = 1e-13 * mx * h * static_cast<double>(st.count());
            for (std::size_t i = 0; i < grid.size(); ++i) {
                double v = c[i] / h;  // fft_convolve already applies the cell volume
                if (v > floor)
                    acc[i] += d.b_power(-l) * h * v;
            }
        }
    }
    GridFunction out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = std::sqrt(acc[i]);
    return out;
}

bool tent_contains(const Dilation& d, const DilatedBall& ball, const Vector& y, int l)
{
    return ball_containment(d, DilatedBall{y, l}, ball);
}

GridFunction hl_maximal(const GridFunction& f, const Dilation& d, int k_min, int k_max)
{
    if (k_min > k_max)
        fail(ErrorCode::InvalidArgument, "empty scale window");
    const Grid& grid = f.grid();
    const int dim = grid.dim();
    const double h = grid.cell_volume();
    const std::size_t n = grid.size();
    std::vector<double> absf(n);
    for (std::size_t i = 0; i < n; ++i)
        absf[i] = std::abs(f[i]);
    GridFunction out(grid);
    std::vector<double> prefix;
    if (dim == 1) {
        prefix.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            prefix[i + 1] = prefix[i] + absf[i];
    }
    // centres run over the half-step lattice: cell midpoints, vertices and everything in between
    std::vector<int> shift(dim);
    for (int k = k_min; k <= k_max; ++k) {
        const double scale = h / d.b_power(k);
        for (int pattern = 0; pattern < (1 << dim); ++pattern) {
            for (int a = 0; a < dim; ++a)
                shift[a] = (pattern >> a) & 1;
            Stencil st = shifted_ball_stencil(grid, d, k, shift);
            if (st.count() == 0)
                continue;
            std::vector<double> avg(n, 0.0);
            long lo = 0, hi = 0;
            if (contiguous_1d(st, lo, hi)) {
                const long len = static_cast<long>(n);
                for (long y = 0; y < len; ++y) {
                    long a = std::max(0L, y + lo), b = std::min(len - 1, y + hi);
                    avg[y] = a <= b ? (prefix[b + 1] - prefix[a]) * scale : 0.0;
                }
                // x lies in the ball of centre y iff x - y is in [lo, hi]
                std::vector<double> m = sliding_max(avg, -hi, -lo);
                for (std::size_t i = 0; i < n; ++i)
                    out[i] = std::max(out[i], m[i]);
                continue;
            }
            parallel_for(n, [&](std::size_t y) {
                std::vector<int> base(dim);
                grid.unflatten(y, base.data());
                double s = 0;
                for_each_offset(grid, base.data(), st, [&](std::size_t z, std::size_t) { s += absf[z]; });
                avg[y] = s * scale;
            });
            Stencil back = negated(st);
            parallel_for(n, [&](std::size_t x) {
                std::vector<int> base(dim);
                grid.unflatten(x, base.data());
                double m = out[x];
                for_each_offset(grid, base.data(), back, [&](std::size_t y, std::size_t) { m = std::max(m, avg[y]); });
                out[x] = m;
            });
        }
    }
    return out;
}

ScaleFunction TentAtom::dense(const ScaleFunction& shape) const
{
    ScaleFunction out(shape.grid(), shape.scale_min(), shape.scale_max());
    for (std::size_t t = 0; t < nodes.size(); ++t)
        out.values()[nodes[t]] = values[t];
    return out;
}

ScaleFunction TentAtomSet::reconstruct() const
{
    ScaleFunction out(grid, scale_min, scale_max);
    for (const auto& a : atoms) {
        for (std::size_t t = 0; t < a.nodes.size(); ++t)
            out.values()[a.nodes[t]] += a.lambda * a.values[t];
    }
    return out;
}

TentAtomSet tent_atomic_decomposition(const ScaleFunction& G, const Exponent& p, const Dilation& d,
                                      const DecompositionOptions& opt)
{
    if (!(opt.gamma > 0 && opt.gamma < 1))
        fail(ErrorCode::InvalidArgument, "gamma must lie in (0, 1)");
    if (!G.all_finite())
        fail(ErrorCode::NonFinite, "scale function has non-finite values");
    const Grid& grid = G.grid();
    if (p.grid() != grid)
        fail(ErrorCode::InvalidArgument, "exponent and scale function live on different grids");
    const std::size_t npts = grid.size();

    TentAtomSet set;
    set.grid = grid;
    set.scale_min = G.scale_min();
    set.scale_max = G.scale_max();

    GridFunction area = lusin_area(G, d);
    double amin = 0, amax = 0;
    for (std::size_t i = 0; i < npts; ++i) {
        if (area[i] > 0) {
            amin = amin == 0 ? area[i] : std::min(amin, area[i]);
            amax = std::max(amax, area[i]);
        }
    }
    std::vector<std::size_t> nonzero;
    double total_mass = 0;
    for (std::size_t node = 0; node < G.size(); ++node) {
        if (G.values()[node] != 0) {
            nonzero.push_back(node);
            total_mass += G.values()[node] * G.values()[node];
        }
    }
    set.nonzero_nodes = nonzero.size();
    if (nonzero.empty() || amax == 0)
        return set;
    set.area_norm = luxemburg_norm(area, p);

    const int jmin = static_cast<int>(std::floor(std::log2(amin))) - 1;
    const int jmax = static_cast<int>(std::ceil(std::log2(amax)));
    set.level_min = jmin;
    set.level_max = jmax;
    const int nlev = jmax - jmin + 1;

    // Maximal-function window: down to balls below one cell so that O_j sits inside its dilation.
    int kmin = G.scale_min();
    while (kmin > -d.level_cap() && d.b_power(kmin) > grid.cell_volume())
        --kmin;
    const int kmax = G.scale_max() + d.omega() + 2;

    std::vector<std::vector<char>> level_set(nlev), dilated(nlev);
    for (int t = 0; t < nlev; ++t) {
        const double thr = std::ldexp(1.0, jmin + t);
        GridFunction ind(grid);
        level_set[t].assign(npts, 0);
        for (std::size_t i = 0; i < npts; ++i) {
            if (area[i] > thr) {
                level_set[t][i] = 1;
                ind[i] = 1;
            }
        }
        GridFunction m = hl_maximal(ind, d, kmin, kmax);
        dilated[t].assign(npts, 0);
        for (std::size_t i = 0; i < npts; ++i)
            dilated[t][i] = m[i] > 1 - opt.gamma ? 1 : 0;
        for (std::size_t i = 0; i < npts; ++i) {
            if (level_set[t][i] && !dilated[t][i])
                ++set.sandwich_violations;
            if (t > 0 && level_set[t][i] && !level_set[t - 1][i])
                ++set.sandwich_violations;
        }
    }

    StencilCache stencils(grid, d);
    // Level of each nonzero node: highest j with (y, l) in the discrete tent of (O_j)*.
    std::vector<int> node_level(nonzero.size(), -1);
    for (std::size_t t = 0; t < nonzero.size(); ++t) {
        const std::size_t node = nonzero[t];
        const int l = G.scale_of(node);
        const std::size_t y = G.point_of(node);
        const Stencil& st = stencils.ball(l);
        for (int lev = nlev - 1; lev >= 0; --lev) {
            if (dilated[lev][y] && inside_set(grid, dilated[lev], y, st)) {
                node_level[t] = lev;
                break;
            }
        }
    }

    double leaked = 0;
    std::vector<int> overlap(npts, 0);
    std::vector<double> nominal;
    BallConfiguration coeffs;
    for (int lev = 0; lev < nlev; ++lev) {
        std::vector<std::size_t> members;
        for (std::size_t t = 0; t < nonzero.size(); ++t) {
            if (node_level[t] == lev)
                members.push_back(t);
        }
        if (members.empty())
            continue;
        const std::vector<char>& S = dilated[lev];
        // Greedy Whitney-type cover of S in flat order; the first ball owns each point.
        std::vector<int> owner(npts, -1);
        std::vector<DilatedBall> cover;
        std::fill(overlap.begin(), overlap.end(), 0);
        for (std::size_t x = 0; x < npts; ++x) {
            if (!S[x] || owner[x] >= 0)
                continue;
            int chosen = kmin;
            for (int k = kmax; k >= kmin; --k) {
                if (inside_set(grid, S, x, stencils.ball(k + d.omega()))) {
                    chosen = k;
                    break;
                }
            }
            const int idx = static_cast<int>(cover.size());
            cover.push_back({grid.point(x), chosen});
            std::vector<int> base(grid.dim());
            grid.unflatten(x, base.data());
            for_each_offset(grid, base.data(), stencils.ball(chosen), [&](std::size_t z, std::size_t) {
                ++overlap[z];
                if (S[z] && owner[z] < 0)
                    owner[z] = idx;
            });
            owner[x] = idx;
        }
        for (std::size_t i = 0; i < npts; ++i)
            set.max_overlap = std::max(set.max_overlap, overlap[i]);

        std::vector<std::vector<std::size_t>> pieces(cover.size());
        for (std::size_t t : members)
            pieces[owner[G.point_of(nonzero[t])]].push_back(nonzero[t]);

        const int j = jmin + lev;
        for (std::size_t k = 0; k < cover.size(); ++k) {
            if (pieces[k].empty())
                continue;
            TentAtom atom;
            atom.level = j;
            atom.cover_index = static_cast<int>(k);
            atom.nodes = pieces[k];
            DilatedBall ball = cover[k];
            for (int e = 0;; ++e) {
                DilatedBall b{cover[k].center, cover[k].scale + e};
                bool all = true;
                for (std::size_t node : atom.nodes) {
                    if (!tent_contains(d, b, grid.point(G.point_of(node)), G.scale_of(node))) {
                        all = false;
                        break;
                    }
                }
                if (all) {
                    ball = b;
                    atom.enlargement = e;
                    break;
                }
                if (b.scale >= d.level_cap())
                    fail(ErrorCode::CoverFailure, "no enlargement of a cover ball holds its tent region");
            }
            atom.ball = ball;
            const double nrm = indicator_norm(d, ball, p);
            const int e2 = static_cast<int>(std::ceil(std::log2(nrm)));
            atom.lambda_nominal = std::ldexp(nrm, j);
            atom.lambda = std::ldexp(1.0, j + e2);
            atom.values.reserve(atom.nodes.size());
            for (std::size_t node : atom.nodes) {
                double g = G.values()[node];
                double a = std::ldexp(g, -(j + e2));
                atom.values.push_back(a);
                if (std::abs(a) > std::abs(g) / atom.lambda_nominal)
                    set.pointwise_ok = false;
                if (!tent_contains(d, ball, grid.point(G.point_of(node)), G.scale_of(node)))
                    set.support_ok = false;
            }
            coeffs.entries.push_back({ball, atom.lambda_nominal});
            set.atoms.push_back(std::move(atom));
        }
    }

    for (std::size_t t = 0; t < nonzero.size(); ++t) {
        if (node_level[t] < 0) {
            ++set.leaked_nodes;
            double g = G.values()[nonzero[t]];
            leaked += g * g;
        }
    }
    set.leakage_ratio = total_mass > 0 ? leaked / total_mass : 0.0;

    std::vector<int> hits(G.size(), 0);
    for (const auto& a : set.atoms) {
        for (std::size_t node : a.nodes) {
            if (++hits[node] > 1)
                set.disjoint = false;
        }
    }
    ScaleFunction rec = set.reconstruct();
    for (std::size_t t = 0; t < nonzero.size(); ++t) {
        if (node_level[t] >= 0) {
            std::size_t node = nonzero[t];
            set.reconstruction_residual =
                std::max(set.reconstruction_residual, std::abs(rec.values()[node] - G.values()[node]));
        }
    }
    if (!coeffs.entries.empty()) {
        set.coefficient_norm = aggregate_norm(coeffs, d, p, p.underline_p());
        set.bound_constant = set.area_norm > 0 ? set.coefficient_norm / set.area_norm : 0.0;
    }
    if (set.leakage_ratio > opt.leakage_bound)
        fail(ErrorCode::CoverFailure, "leakage ratio " + std::to_string(set.leakage_ratio) + " exceeds the bound");
    return set;
}

TentAtomValidation tent_atom_validate(const ScaleFunction& a, const DilatedBall& ball, const std::vector<double>& qs,
                                      const Exponent& p, const Dilation& d)
{
    TentAtomValidation v;
    const Grid& grid = a.grid();
    for (std::size_t node = 0; node < a.size(); ++node) {
        if (a.values()[node] == 0)
            continue;
        if (!tent_contains(d, ball, grid.point(a.point_of(node)), a.scale_of(node))) {
            v.support_ok = false;
            ++v.outside_nodes;
        }
    }
    GridFunction area = lusin_area(a, d);
    const double vol = ball_volume(d, ball);
    const double nrm = indicator_norm(d, ball, p);
    for (double q : qs) {
        double s = 0;
        for (std::size_t i = 0; i < area.size(); ++i)
            s += std::pow(area[i], q);
        double size = std::pow(s * grid.cell_volume(), 1.0 / q);
        double bound = std::pow(vol, 1.0 / q) / nrm;
        v.qs.push_back(q);
        v.sizes.push_back(size);
        v.bounds.push_back(bound);
        if (size > bound * (1 + 1e-12))
            v.size_ok = false;
    }
    v.infinity_atom = v.support_ok && v.size_ok;
    return v;
}

}  // namespace anivar
