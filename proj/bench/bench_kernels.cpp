// Serial reference path vs OpenMP kernels on a synthetic economy.

#include <map>

#include <benchmark/benchmark.h>

#include "ccesnet/cces.hpp"
#include "ccesnet/equilibrium.hpp"
#include "ccesnet/netanalysis.hpp"
#include "ccesnet/synthetic.hpp"
#include "ccesnet/triangulate.hpp"

using namespace ccesnet;

namespace {

const SyntheticEconomy& fixture(int n) {
  static std::map<int, SyntheticEconomy> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    GeneratorConfig cfg;
    cfg.n = n;
    cfg.seed = 11;
    it = cache.emplace(n, generate_economy(cfg)).first;
  }
  return it->second;
}

Exec mode(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void BM_LinearityCurve(benchmark::State& state) {
  const auto& s = fixture(static_cast<int>(state.range(0)));
  const auto grid = GammaGrid{}.values();
  const auto u = incidence(s.data.B.bottomRows(s.data.n));
  for (auto _ : state) benchmark::DoNotOptimize(linearity_curve(u, grid, mode(state)));
}

void BM_CalibrateAll(benchmark::State& state) {
  const auto& s = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(calibrate_all(s.data, s.nest_order, s.sector_ids, mode(state)));
}

void BM_UnitCosts(benchmark::State& state) {
  const auto& s = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(unit_costs(s.economy, s.data.p, s.data.p0, mode(state)));
}

void BM_DistanceMatrix(benchmark::State& state) {
  const auto& s = fixture(static_cast<int>(state.range(0)));
  const Matrix mu = net_multipliers(s.data.B.bottomRows(s.data.n));
  for (auto _ : state) benchmark::DoNotOptimize(distance_matrix(mu, mode(state)));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {50, 200}) {
    for (int par : {0, 1}) b->Args({n, par});
  }
  b->ArgNames({"n", "parallel"})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_LinearityCurve)->Apply(sizes);
BENCHMARK(BM_CalibrateAll)->Apply(sizes);
BENCHMARK(BM_UnitCosts)->Apply(sizes);
BENCHMARK(BM_DistanceMatrix)->Apply(sizes);
BENCHMARK_MAIN();
