#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "dyon/fixed_point.hpp"
#include "dyon/kernels.hpp"
#include "dyon/oracle.hpp"
#include "dyon/shooting.hpp"

using namespace dyon;

namespace {

struct Arrays {
    std::vector<double> r, a, b, c;
    explicit Arrays(std::size_t n) : r(n), a(n), b(n), c(n) {
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = 1e-3 + 100.0 * static_cast<double>(i) / static_cast<double>(n);
            a[i] = std::sin(0.1 * static_cast<double>(i));
            b[i] = std::cos(0.3 * static_cast<double>(i));
            c[i] = std::exp(-r[i]);
        }
    }
};

Parameters acceptance() {
    Parameters p;
    p.A0 = p.B0 = 0.3;
    return p;
}

void BM_WeightedSup(benchmark::State& st, Exec exec) {
    const Arrays x(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(
            kernels::weighted_sup(x.r.data(), x.a.data(), x.b.data(), x.c.data(), x.r.size(), 0.18, exec));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_MaxAbsDiff(benchmark::State& st, Exec exec) {
    const Arrays x(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::max_abs_diff(x.a.data(), x.b.data(), x.a.size(), exec));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_Assemble(benchmark::State& st, Exec exec) {
    const DerivedConstants c = derive(acceptance());
    SolveOptions o;
    o.grid_n = static_cast<std::size_t>(st.range(0));
    const FieldProfile g = initial_guess(c, solver_grid(c, o));
    std::vector<collocation::Vec6> y(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t k = 0; k < kFieldCount; ++k) y[i][k] = g.value[k][i];
    for (auto _ : st) benchmark::DoNotOptimize(collocation::assemble(c, g.r, y, exec));
}

void BM_ClassifySweep(benchmark::State& st, Exec exec) {
    const DerivedConstants c = derive(Parameters{});
    SolveOptions o;
    o.grid_n = 400;
    const FieldProfile bg = initial_guess(c, solver_grid(c, o));
    std::vector<double> params;
    for (int i = 0; i < 32; ++i) params.push_back(-std::pow(10.0, -3.0 + 0.2 * i));
    for (auto _ : st)
        benchmark::DoNotOptimize(classify_sweep(Field::f, params, bg, c, bg.r.back(), exec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_WeightedSup, serial, Exec::Serial)->Arg(2000)->Arg(100000)->Arg(1000000);
BENCHMARK_CAPTURE(BM_WeightedSup, parallel, Exec::Parallel)->Arg(2000)->Arg(100000)->Arg(1000000);
BENCHMARK_CAPTURE(BM_MaxAbsDiff, serial, Exec::Serial)->Arg(2000)->Arg(100000)->Arg(1000000);
BENCHMARK_CAPTURE(BM_MaxAbsDiff, parallel, Exec::Parallel)->Arg(2000)->Arg(100000)->Arg(1000000);
BENCHMARK_CAPTURE(BM_Assemble, serial, Exec::Serial)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Assemble, parallel, Exec::Parallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_ClassifySweep, serial, Exec::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ClassifySweep, parallel, Exec::Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
