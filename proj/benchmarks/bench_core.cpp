#include <benchmark/benchmark.h>

#include <random>

#include "gbd/gbd.hpp"

using namespace gbd;

static void BM_PerronEstimate(benchmark::State& state) {
  const Matrix m = catalog_get("A5").matrix();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(perron_estimate(m, 1, n, Window{1, 200}).lambda);
}
BENCHMARK(BM_PerronEstimate)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_PowerEntry(benchmark::State& state) {
  const Matrix m = catalog_get("A1").matrix();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(power_entry(m, n, 0, 0));
}
BENCHMARK(BM_PowerEntry)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_VershikStep(benchmark::State& state) {
  CatalogEntry e = catalog_get("SlantedOrder");
  const OrderedDiagram& od = *e.ordered;
  HeightTable h(od.diagram());
  std::mt19937_64 rng(3);
  std::vector<OrderedPath> xs;
  for (int i = 0; i < 256; ++i) xs.push_back(OrderedPath::from(random_path_into(od.diagram(), h, 1 + i % 8, 12, rng), od.default_tail()));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(vershik_step(od, xs[i++ % xs.size()], 12).m);
}
BENCHMARK(BM_VershikStep)->Unit(benchmark::kMicrosecond);

static void BM_InvariantVectors(benchmark::State& state) {
  const Diagram d = catalog_get("A5").diagram;
  InverseLimitOptions opts;
  opts.depth_gap = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(invariant_vectors(d, 4, Window{1, 30}, 1e-10, opts).cauchy);
}
BENCHMARK(BM_InvariantVectors)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
