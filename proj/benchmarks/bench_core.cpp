#include <benchmark/benchmark.h>

#include <cmath>

#include "anivar/campanato.hpp"
#include "anivar/carleson.hpp"
#include "anivar/exponent.hpp"
#include "anivar/tent.hpp"

using namespace anivar;

namespace {

Matrix two()
{
    Matrix m(1, 1);
    m << 2;
    return m;
}

Grid line(long n)
{
    return Grid::cube(1, -8, 8, static_cast<int>(n));
}

GridFunction wave(const Grid& g)
{
    return sample(g, [](const Vector& x) { return std::exp(-x[0] * x[0]) + 0.3 * std::sin(3 * x[0]); });
}

ScaleFunction bumps(const Grid& g, int lmin, int lmax)
{
    ScaleFunction G(g, lmin, lmax);
    Vector x(1);
    for (int l = lmin; l <= lmax; ++l) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.point(i, x.data());
            double t = (x[0] - 0.3 * l) / 2;
            G(l, i) = std::abs(t) < 1 ? std::pow(1 - t * t, 3) * (1 + 0.2 * l) : 0.0;
        }
    }
    return G;
}

}  // namespace

static void BM_Luxemburg(benchmark::State& st)
{
    Grid g = line(st.range(0));
    Exponent p(sample(g, [](const Vector& x) { return 1.5 + 0.5 * std::sin(x[0]); }), 1.5);
    GridFunction f = wave(g);
    for (auto _ : st)
        benchmark::DoNotOptimize(luxemburg_solve(f, p).norm);
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Luxemburg)->RangeMultiplier(4)->Range(1024, 65536)->Complexity();

static void BM_LusinArea(benchmark::State& st)
{
    Dilation d(two());
    ScaleFunction G = bumps(line(st.range(0)), -1, 2);
    for (auto _ : st)
        benchmark::DoNotOptimize(lusin_area(G, d).values().data());
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_LusinArea)->RangeMultiplier(2)->Range(1024, 8192)->Complexity();

static void BM_HLMaximal(benchmark::State& st)
{
    Dilation d(two());
    Grid g = line(st.range(0));
    GridFunction f = wave(g);
    for (auto _ : st)
        benchmark::DoNotOptimize(hl_maximal(f, d, -4, 1).values().data());
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_HLMaximal)->RangeMultiplier(2)->Range(1024, 8192)->Complexity();

static void BM_CampanatoSearch(benchmark::State& st)
{
    Dilation d(two());
    Grid g = line(2048);
    GridFunction f = wave(g);
    CampanatoParams prm;
    prm.p = Exponent::constant(g, 0.9);
    prm.q = 1;
    SearchOptions so;
    so.budget = static_cast<int>(st.range(0));
    so.scale_min = -3;
    so.scale_max = 1;
    for (auto _ : st)
        benchmark::DoNotOptimize(campanato_type_norm(f, d, prm, so).value);
}
BENCHMARK(BM_CampanatoSearch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_TentDecomposition(benchmark::State& st)
{
    Dilation d(two());
    Grid g = line(st.range(0));
    ScaleFunction G = bumps(g, -2, 1);
    Exponent p = Exponent::constant(g, 0.8);
    for (auto _ : st)
        benchmark::DoNotOptimize(tent_atomic_decomposition(G, p, d).atoms.size());
    st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_TentDecomposition)->RangeMultiplier(2)->Range(1024, 4096)->Unit(benchmark::kMillisecond);

static void BM_CarlesonFromFunction(benchmark::State& st)
{
    Dilation d(two());
    Grid g = line(st.range(0));
    AnalyzingFunction phi = build_analyzing_function(g, d, 1);
    GridFunction b = wave(g);
    for (auto _ : st)
        benchmark::DoNotOptimize(carleson_from_function(b, phi, d, -3, 2).values().data());
}
BENCHMARK(BM_CarlesonFromFunction)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
