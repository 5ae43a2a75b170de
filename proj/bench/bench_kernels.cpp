#include <benchmark/benchmark.h>

#include <vector>

#include "nsgap/kernels.hpp"
#include "nsgap/solver.hpp"
#include "nsgap/spectral_field.hpp"

namespace {

using namespace nsgap;
namespace K = nsgap::kernels;

struct Data {
  Grid grid;
  std::vector<SpectralField::Coeffs> coeffs;

  explicit Data(int n) : grid(make_grid(3, n)), coeffs(random_divfree(grid, -3.0, 7).components()) {}

  K::Components view() {
    K::Components c{};
    for (int i = 0; i < grid.dim; ++i) c[i] = coeffs[i];
    return c;
  }
};

template <bool Parallel>
void BM_SumKsq(benchmark::State& state) {
  Data d(static_cast<int>(state.range(0)));
  const auto v = K::as_const(d.view());
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? K::parallel::sum_ksq_sq(d.grid, v) : K::serial::sum_ksq_sq(d.grid, v));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.grid.size()));
}

template <bool Parallel>
void BM_Leray(benchmark::State& state) {
  Data d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if (Parallel) {
      K::parallel::leray_project(d.grid, d.view());
    } else {
      K::serial::leray_project(d.grid, d.view());
    }
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.grid.size()));
}

template <bool Parallel>
void BM_Symmetrize(benchmark::State& state) {
  Data d(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if (Parallel) {
      K::parallel::hermitian_symmetrize(d.grid, d.view());
    } else {
      K::serial::hermitian_symmetrize(d.grid, d.view());
    }
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.grid.size()));
}

void BM_Rhs(benchmark::State& state) {
  const Grid g = make_grid(3, static_cast<int>(state.range(0)));
  SolverConfig cfg;
  cfg.grid = g;
  cfg.m = g.n / 4;
  MnsSolver solver(cfg);
  const SpectralField v = random_divfree(g, -3.0, 7);
  for (auto _ : state) benchmark::DoNotOptimize(solver.rhs(v));
}

BENCHMARK(BM_SumKsq<false>)->Arg(32)->Arg(64);
BENCHMARK(BM_SumKsq<true>)->Arg(32)->Arg(64);
BENCHMARK(BM_Leray<false>)->Arg(32)->Arg(64);
BENCHMARK(BM_Leray<true>)->Arg(32)->Arg(64);
BENCHMARK(BM_Symmetrize<false>)->Arg(32)->Arg(64);
BENCHMARK(BM_Symmetrize<true>)->Arg(32)->Arg(64);
BENCHMARK(BM_Rhs)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
