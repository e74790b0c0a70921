// OpenMP kernels against the serial reference on the production grid sizes.

#include <benchmark/benchmark.h>

#include <random>

#include "wavepart/charge.hpp"
#include "wavepart/kernels.hpp"

using namespace wp;
namespace K = wp::kernels;

namespace {

struct Data {
  Grid3 grid;
  SpectralData a, b;
  RealData f;
  ChargeDensity rho;

  explicit Data(int n)
      : grid(n, n / 3.0),
        a(grid.size()),
        b(grid.size()),
        f(grid.size()),
        rho(make_admissible_density(1.0, 0.01, grid)) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    for (std::size_t m = 0; m < grid.size(); ++m) {
      a[m] = {normal(rng), normal(rng)};
      b[m] = {normal(rng), normal(rng)};
      f[m] = normal(rng);
    }
  }
};

Data& data(int n) {
  static Data d64(64), d96(96);
  return n == 64 ? d64 : d96;
}

template <bool Omp>
void BM_forced_flow(benchmark::State& state) {
  auto& d = data(static_cast<int>(state.range(0)));
  K::ForcedSource src;
  src.rho_hat = d.rho.rho_hat;
  src.scale = -1.0;
  src.shift = Vec3(0.1, 0.2, 0.3);
  for (auto _ : state) {
    const Vec3 r = Omp ? K::omp::forced_flow(d.grid, d.a, d.b, src, Vec3(0.3, 0, 0), 1e-3)
                       : K::ref::forced_flow(d.grid, d.a, d.b, src, Vec3(0.3, 0, 0), 1e-3);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * d.grid.size());
}

template <bool Omp>
void BM_inner(benchmark::State& state) {
  auto& d = data(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(Omp ? K::omp::inner(d.grid, d.a, d.b) : K::ref::inner(d.grid, d.a, d.b));
  state.SetItemsProcessed(state.iterations() * d.grid.size());
}

template <bool Omp>
void BM_weighted_sq(benchmark::State& state) {
  auto& d = data(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(Omp ? K::omp::weighted_sq(d.grid, d.f, Vec3::Zero(), 4.25)
                                 : K::ref::weighted_sq(d.grid, d.f, Vec3::Zero(), 4.25));
  state.SetItemsProcessed(state.iterations() * d.grid.size());
}

template <bool Omp>
void BM_shift_phase(benchmark::State& state) {
  auto& d = data(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    if (Omp) K::omp::shift_phase(d.grid, d.a, Vec3(1e-3, 0, 0));
    else K::ref::shift_phase(d.grid, d.a, Vec3(1e-3, 0, 0));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * d.grid.size());
}

template <bool Omp>
void BM_moments(benchmark::State& state) {
  auto& d = data(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(Omp ? K::omp::moments(d.grid, d.f, 4) : K::ref::moments(d.grid, d.f, 4));
  state.SetItemsProcessed(state.iterations() * d.grid.size());
}

}  // namespace

BENCHMARK(BM_forced_flow<true>)->Name("forced_flow/omp")->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forced_flow<false>)->Name("forced_flow/ref")->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_inner<true>)->Name("inner/omp")->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_inner<false>)->Name("inner/ref")->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_weighted_sq<true>)->Name("weighted_sq/omp")->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_weighted_sq<false>)->Name("weighted_sq/ref")->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_shift_phase<true>)->Name("shift_phase/omp")->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_shift_phase<false>)->Name("shift_phase/ref")->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_moments<true>)->Name("moments/omp")->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_moments<false>)->Name("moments/ref")->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
