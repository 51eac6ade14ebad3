#include "anivar/fourier.hpp"

#include <fftw3.h>

#include <mutex>

#include "anivar/error.hpp"

namespace anivar {

namespace {
std::mutex plan_mutex;
}

int fft_friendly_size(int n)
{
    for (int m = std::max(n, 1);; ++m) {
        int r = m;
        for (int p : {2, 3, 5})
            while (r % p == 0)
                r /= p;
        if (r == 1)
            return m;
    }
}

void fft(ComplexArray& data, const std::vector<int>& dims, bool inverse)
{
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), ptr, ptr,
                             inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    if (!plan)
        fail(ErrorCode::InvalidArgument, "fft plan creation failed");
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
}

SpectralDomain::SpectralDomain(const Grid& grid, const std::vector<int>& padded)
    : grid_(grid), dims_(padded)
{
    const int n = grid.dim();
    if (static_cast<int>(dims_.size()) != n)
        fail(ErrorCode::InvalidArgument, "padded dims mismatch");
    stride_.resize(n);
    for (int a = n - 1; a >= 0; --a) {
        if (dims_[a] < grid.resolution()[a])
            fail(ErrorCode::InvalidArgument, "padding smaller than grid");
        stride_[a] = size_;
        size_ *= static_cast<std::size_t>(dims_[a]);
    }
}

SpectralDomain SpectralDomain::padded(const Grid& grid, int factor)
{
    std::vector<int> dims(grid.dim());
    for (int a = 0; a < grid.dim(); ++a)
        dims[a] = fft_friendly_size(factor * grid.resolution()[a]);
    return SpectralDomain(grid, dims);
}

double SpectralDomain::frequency(int axis, int m) const
{
    int len = dims_[axis];
    int k = m < (len + 1) / 2 ? m : m - len;
    return static_cast<double>(k) / (len * grid_.spacing(axis));
}

void SpectralDomain::frequency(std::size_t flat, double* xi) const
{
    for (int a = 0; a < grid_.dim(); ++a) {
        int m = static_cast<int>(flat / stride_[a]);
        flat %= stride_[a];
        xi[a] = frequency(a, m);
    }
}

ComplexArray SpectralDomain::forward(const GridFunction& f) const
{
    ComplexArray data(size_, 0.0);
    const int n = grid_.dim();
    std::vector<int> idx(n);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        grid_.unflatten(i, idx.data());
        std::size_t p = 0;
        for (int a = 0; a < n; ++a)
            p += static_cast<std::size_t>(idx[a]) * stride_[a];
        data[p] = f[i];
    }
    fft(data, dims_, false);
    return data;
}

GridFunction SpectralDomain::inverse(ComplexArray spec) const
{
    fft(spec, dims_, true);
    GridFunction out(grid_);
    const int n = grid_.dim();
    std::vector<int> idx(n);
    const double scale = 1.0 / static_cast<double>(size_);
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        grid_.unflatten(i, idx.data());
        std::size_t p = 0;
        for (int a = 0; a < n; ++a)
            p += static_cast<std::size_t>(idx[a]) * stride_[a];
        out[i] = spec[p].real() * scale;
    }
    return out;
}

GridFunction SpectralDomain::apply(const ComplexArray& fhat, const std::vector<double>& multiplier) const
{
    ComplexArray spec(size_);
    for (std::size_t i = 0; i < size_; ++i)
        spec[i] = fhat[i] * multiplier[i];
    return inverse(std::move(spec));
}

GridFunction fft_convolve(const GridFunction& f, const Stencil& st, const std::vector<double>& w)
{
    const Grid& grid = f.grid();
    const int n = grid.dim();
    std::vector<int> dims(n);
    for (int a = 0; a < n; ++a)
        dims[a] = fft_friendly_size(grid.resolution()[a] + 2 * st.reach[a] + 1);
    SpectralDomain dom(grid, dims);
    ComplexArray fh = dom.forward(f);
    ComplexArray kh(dom.size(), 0.0);
    std::vector<std::size_t> stride(n);
    std::size_t s = 1;
    for (int a = n - 1; a >= 0; --a) {
        stride[a] = s;
        s *= static_cast<std::size_t>(dims[a]);
    }
    for (std::size_t i = 0; i < st.count(); ++i) {
        const int* v = st.offset(i);
        std::size_t p = 0;
        for (int a = 0; a < n; ++a) {
            int m = ((v[a] % dims[a]) + dims[a]) % dims[a];
            p += static_cast<std::size_t>(m) * stride[a];
        }
        kh[p] += w[i];
    }
    fft(kh, dims, false);
    for (std::size_t i = 0; i < dom.size(); ++i)
        fh[i] *= kh[i] * grid.cell_volume();
    return dom.inverse(std::move(fh));
}

}  // namespace anivar
