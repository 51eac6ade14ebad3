#include "anivar/convolution.hpp"

#include <cmath>

#include "anivar/error.hpp"
#include "anivar/fourier.hpp"
#include "anivar/polynomial.hpp"

namespace anivar {

Kernel Kernel::from_grid(const GridFunction& phi, const Dilation& d, int vanishing_moments)
{
    const Grid g = phi.grid();
    const int n = g.dim();
    int level = -d.level_cap();
    Vector x(n);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (phi[i] == 0.0)
            continue;
        g.point(i, x.data());
        while (level < d.level_cap() && !(d.quadratic(x, level) < d.level_c()))
            ++level;
    }
    auto values = std::make_shared<GridFunction>(phi);
    Kernel k;
    k.support_level = level;
    k.vanishing_moments = vanishing_moments;
    // interpolation reaches one sample past the last nonzero one; cut it back to the open ball
    const Matrix form = d.form(level);
    const double c = d.level_c();
    k.eval = [values, n, form, c](const Vector& y) {
        if (!(y.dot(form * y) < c))
            return 0.0;
        const Grid& gr = values->grid();
        std::vector<long> i0(n);
        std::vector<double> t(n);
        for (int a = 0; a < n; ++a) {
            double s = (y[a] - gr.lower()[a]) / gr.spacing(a) - 0.5;
            double fl = std::floor(s);
            i0[a] = static_cast<long>(fl);
            t[a] = s - fl;
        }
        double acc = 0;
        for (int corner = 0; corner < (1 << n); ++corner) {
            double w = 1;
            std::size_t flat = 0;
            bool inside = true;
            for (int a = 0; a < n; ++a) {
                int bit = (corner >> a) & 1;
                long j = i0[a] + bit;
                if (!gr.in_range(a, j)) {
                    inside = false;
                    break;
                }
                w *= bit ? t[a] : 1.0 - t[a];
                flat += static_cast<std::size_t>(j) * gr.stride(a);
            }
            if (inside)
                acc += w * (*values)[flat];
        }
        return acc;
    };
    return k;
}

ScaledKernel scale_kernel(const Kernel& phi, const Grid& grid, const Dilation& d, int k)
{
    const int n = grid.dim();
    const int m = phi.support_level - k;
    Vector ext = d.half_extent(m);
    for (int a = 0; a < n; ++a) {
        if (2.0 * ext[a] < grid.spacing(a))
            fail(ErrorCode::ScaleTooFine, "support of phi_" + std::to_string(k) + " is below one cell");
    }
    ScaledKernel out;
    out.k = k;
    out.stencil = ball_stencil(grid, d, m);
    const std::size_t count = out.stencil.count();
    const std::size_t need = phi.vanishing_moments >= 0 ? multi_indices(n, phi.vanishing_moments).size() + 1 : 1;
    if (count < need)
        fail(ErrorCode::ScaleTooFine, "too few lattice points under phi_" + std::to_string(k));

    const Matrix& ak = d.power(k);
    const double bk = d.b_power(k);
    out.weights.resize(count);
    std::vector<Vector> local(count, Vector(n));
    Vector z(n);
    for (std::size_t i = 0; i < count; ++i) {
        const int* v = out.stencil.offset(i);
        for (int a = 0; a < n; ++a)
            z[a] = v[a] * grid.spacing(a);
        local[i] = ak * z;
        out.weights[i] = bk * phi.eval(local[i]);
    }
    if (phi.vanishing_moments >= 0) {
        auto idx = multi_indices(n, phi.vanishing_moments);
        Matrix zmat(count, idx.size());
        Vector w(count);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t j = 0; j < idx.size(); ++j)
                zmat(i, j) = monomial(local[i], idx[j]);
            w[i] = out.weights[i];
        }
        Vector c = zmat.colPivHouseholderQr().solve(w);
        Vector corr = zmat * c;
        for (std::size_t i = 0; i < count; ++i)
            out.weights[i] -= corr[i];
    }
    return out;
}

GridFunction convolve(const GridFunction& f, const ScaledKernel& kern)
{
    const Grid& grid = f.grid();
    const int n = grid.dim();
    std::size_t nnz = 0;
    for (double v : f.values())
        if (v != 0.0)
            ++nnz;
    const double work = static_cast<double>(nnz) * static_cast<double>(kern.stencil.count());
    if (work > 3e7)
        return fft_convolve(f, kern.stencil, kern.weights);

    GridFunction out(grid);
    const double hv = grid.cell_volume();
    std::vector<int> idx(n);
    for (std::size_t y = 0; y < grid.size(); ++y) {
        const double fy = f[y];
        if (fy == 0.0)
            continue;
        grid.unflatten(y, idx.data());
        for_each_offset(grid, idx.data(), kern.stencil, [&](std::size_t x, std::size_t i) {
            out[x] += fy * kern.weights[i] * hv;
        });
    }
    return out;
}

GridFunction convolve_scaled(const GridFunction& f, const Kernel& phi, const Dilation& d, int k)
{
    return convolve(f, scale_kernel(phi, f.grid(), d, k));
}

GridFunction convolve_scaled(const GridFunction& f, const GridFunction& kernel, const Dilation& d, int k)
{
    return convolve_scaled(f, Kernel::from_grid(kernel, d), d, k);
}

}  // namespace anivar
