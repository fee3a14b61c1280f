#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <random>

#include "crowdpose3d/lap.hpp"

namespace {

Eigen::MatrixXd random_cost(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 10.0);
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c(i, j) = uni(rng);
  return c;
}

void BM_SolveLapJV(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd cost = random_cost(n, 99);
  for (auto _ : state) {
    cp3d::Assignment a = cp3d::solve_lap(cost);
    benchmark::DoNotOptimize(a.pairs.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_SolveLapJV)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_SolveLapHungarian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd cost = random_cost(n, 99);
  for (auto _ : state) {
    cp3d::Assignment a = cp3d::solve_lap(cost, cp3d::LapAlgorithm::kHungarian);
    benchmark::DoNotOptimize(a.pairs.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_SolveLapHungarian)->RangeMultiplier(2)->Range(8, 128)->Complexity();

}  // namespace

BENCHMARK_MAIN();
