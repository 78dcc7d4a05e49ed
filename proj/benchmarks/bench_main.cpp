#include <benchmark/benchmark.h>

#include <random>

#include "ggmrecon/ggm.hpp"
#include "ggmrecon/graph.hpp"
#include "ggmrecon/inference.hpp"
#include "ggmrecon/learning.hpp"
#include "ggmrecon/meanfield.hpp"

namespace {

using namespace ggmrecon;

GgmParams lattice_params(std::size_t n) {
  return {Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), -1.0, 1.0), 0.3, 1.0};
}

Observation half_missing(const Eigen::VectorXd& x) {
  std::vector<Vertex> missing;
  for (Vertex i = 0; i < x.size(); i += 2) missing.push_back(i);
  return {x, missing};
}

void BM_ReconstructMfe(benchmark::State& state) {
  auto side = static_cast<std::size_t>(state.range(0));
  Graph g = make_lattice(side, side);
  GgmParams p = lattice_params(g.size());
  Observation obs = half_missing(sample(g, p, 1, 1).row(0).transpose());
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_mfe(g, p, obs).values.data());
  state.SetComplexityN(static_cast<benchmark::IterationCount>(g.size()));
}
BENCHMARK(BM_ReconstructMfe)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_ReconstructExact(benchmark::State& state) {
  auto side = static_cast<std::size_t>(state.range(0));
  Graph g = make_lattice(side, side);
  GgmParams p = lattice_params(g.size());
  Observation obs = half_missing(sample(g, p, 1, 1).row(0).transpose());
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_exact(g, p, obs).values.data());
  state.SetComplexityN(static_cast<benchmark::IterationCount>(g.size()));
}
BENCHMARK(BM_ReconstructExact)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_SampleLattice(benchmark::State& state) {
  auto side = static_cast<std::size_t>(state.range(0));
  Graph g = make_lattice(side, side);
  GgmParams p = lattice_params(g.size());
  for (auto _ : state) benchmark::DoNotOptimize(sample(g, p, 100, 3).data());
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SampleLattice)->Arg(16)->Arg(64);

void BM_FitLattice(benchmark::State& state) {
  Graph g = make_lattice(5, 5);
  GgmParams truth = lattice_params(g.size());
  EmpiricalMoments em = empirical_moments(sample(g, truth, 2000, 4), g);
  LearnConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit(g, em, cfg, default_init(em)).params.xi);
}
BENCHMARK(BM_FitLattice)->Unit(benchmark::kMillisecond);

void BM_AnalyticMse(benchmark::State& state) {
  AnalysisSetup s{1.0, 0.2, 1.5, 0.4, 1.0, 0.5, 0.1, 0.2, 0.5};
  for (auto _ : state) {
    s.p = s.p < 0.9 ? s.p + 1e-3 : 0.1;
    benchmark::DoNotOptimize(analytic_mse(s));
  }
}
BENCHMARK(BM_AnalyticMse);

void BM_MonteCarloTrial(benchmark::State& state) {
  AnalysisSetup s{1.0, 0.2, 1.0, 0.2, 1.0, 0.5, 0.0, 0.0, 0.5};
  McConfig mc{static_cast<std::size_t>(state.range(0)), 1, 5};
  for (auto _ : state) benchmark::DoNotOptimize(mc_mse(s, mc).mean);
}
BENCHMARK(BM_MonteCarloTrial)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
