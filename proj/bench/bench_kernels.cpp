#include <benchmark/benchmark.h>

#include <cmath>

#include "agplan/kernels.hpp"
#include "agplan/mobility.hpp"
#include "agplan/switch_opt.hpp"
#include "agplan/terrain.hpp"

namespace {

agplan::TerrainGrid bench_grid(int n) {
  agplan::SynthSpec s;
  s.kind = agplan::SynthKind::random_smooth;
  s.ncols = n;
  s.nrows = n;
  s.amplitude = 30.0;
  s.seed = 7;
  return agplan::synthesize_terrain(s);
}

void BM_GradientSerial(benchmark::State& state) {
  const auto g = bench_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(agplan::gradient_field_serial(g));
}

void BM_GradientParallel(benchmark::State& state) {
  const auto g = bench_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(agplan::gradient_field(g));
}

void BM_MaskSerial(benchmark::State& state) {
  const auto g = bench_grid(static_cast<int>(state.range(0)));
  const agplan::MobilityLimits lim;
  for (auto _ : state) benchmark::DoNotOptimize(agplan::feasibility_mask_serial(g, lim));
}

void BM_MaskParallel(benchmark::State& state) {
  const auto g = bench_grid(static_cast<int>(state.range(0)));
  const agplan::MobilityLimits lim;
  for (auto _ : state) benchmark::DoNotOptimize(agplan::feasibility_mask(g, lim));
}

std::vector<agplan::GridIndex> disk_cells(const agplan::TerrainGrid& g) {
  const auto mask = agplan::feasibility_mask(g, {});
  const agplan::SwitchDomain d(g, {g.ncols() / 2, g.nrows() / 2}, 16 * g.cell_size(), mask);
  return d.cells();
}

agplan::SwitchFitness probe(const agplan::TerrainGrid& g, agplan::GridIndex c) {
  const agplan::TerrainGradient gr = g.gradient_at(c);
  const double f = std::abs(gr.gx) + std::abs(gr.gy) + 2.0 * gr.gz;
  return {0.0, f, f};
}

void BM_ExhaustiveSerial(benchmark::State& state) {
  const auto g = bench_grid(64);
  const auto cells = disk_cells(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(agplan::map_serial(cells, [&](agplan::GridIndex c) { return probe(g, c); }));
  }
}

void BM_ExhaustiveParallel(benchmark::State& state) {
  const auto g = bench_grid(64);
  const auto cells = disk_cells(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(agplan::map_parallel(cells, [&](agplan::GridIndex c) { return probe(g, c); }));
  }
}

}  // namespace

BENCHMARK(BM_ExhaustiveSerial);
BENCHMARK(BM_ExhaustiveParallel);
BENCHMARK(BM_GradientSerial)->Arg(128)->Arg(512);
BENCHMARK(BM_GradientParallel)->Arg(128)->Arg(512);
BENCHMARK(BM_MaskSerial)->Arg(128)->Arg(512);
BENCHMARK(BM_MaskParallel)->Arg(128)->Arg(512);

BENCHMARK_MAIN();
