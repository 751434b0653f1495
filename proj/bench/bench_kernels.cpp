// Serial reference vs OpenMP for the kernels that dominate run time.
// Arg 0 selects the path (0 serial, 1 OpenMP); the grid size is the second.
#include <benchmark/benchmark.h>

#include <cmath>

#include "cwave/pde.hpp"
#include "cwave/surface.hpp"

using namespace cwave;

namespace {

Exec path(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "openmp" : "serial"); }

void BM_banded_apply(benchmark::State& st) {
    const Space sp(build_grid(14.0, (int)st.range(1)), 3.0);
    CVec in(sp.n()), out(sp.n());
    for (std::size_t i = 0; i < sp.n(); ++i) in[i] = cplx(std::sin(sp.grid.xi[i]), std::cos(0.3 * sp.grid.xi[i]));
    const Exec ex = path(st);
    for (auto _ : st) {
        kern::banded_apply(sp.d2.start.data(), sp.d2.w.data(), sp.d2.width, sp.n(), in.data(), out.data(), ex);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * (long)sp.n());
    label(st);
}

void BM_pde_rhs(benchmark::State& st) {
    const Space sp(build_grid(18.0, (int)st.range(1)), 3.0);
    const SolitonConfig cfg{{-3.0, 3.0}, {0.0, 2.5}};
    PdeState s = multisoliton_state(sp, cfg);
    for (std::size_t i = 0; i < sp.n(); ++i) s.u[i] = 1e-3 * std::exp(-sp.grid.xi[i] * sp.grid.xi[i]);
    const PdeOptions opt;
    set_default_exec(path(st));
    for (auto _ : st) {
        PdeRhs r = pde_rhs(sp, s, &opt);
        benchmark::DoNotOptimize(r.dv.data());
    }
    set_default_exec(Exec::parallel);
    st.SetItemsProcessed(st.iterations() * (long)sp.n());
    label(st);
}

void BM_physical_rhs(benchmark::State& st) {
    PhysicalOptions o;
    o.half_width = 2.0;
    o.dx = 4.0 / (double)st.range(1);
    const PhysicalState s = odd_state(OddProfile{}, o);
    const std::vector<char> active(s.n(), 1);
    CVec out;
    const Exec ex = path(st);
    for (auto _ : st) {
        physical_rhs(s, active, o.p, out, ex);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * (long)s.n());
    label(st);
}

void sizes(benchmark::internal::Benchmark* b) {
    for (int ex : {0, 1})
        for (long n : {2048L, 16384L, 131072L}) b->Args({ex, n});
}

}  // namespace

BENCHMARK(BM_banded_apply)->Apply(sizes);
BENCHMARK(BM_pde_rhs)->Apply(sizes);
BENCHMARK(BM_physical_rhs)->Apply(sizes);

BENCHMARK_MAIN();
