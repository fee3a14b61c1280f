#include <benchmark/benchmark.h>

#include "crowdpose3d/pipeline.hpp"
#include "crowdpose3d/synth.hpp"

namespace {

void BM_SolvePerson(benchmark::State& state) {
  cp3d::SceneSpec spec;
  spec.n_persons = 1;
  spec.n_views = static_cast<int>(state.range(0));
  spec.noise_px = 2.0;
  spec.seed = 5;
  const cp3d::GroundTruth gt = cp3d::generate(spec);

  cp3d::PersonObservations obs;
  for (int v = 0; v < spec.n_views; ++v)
    if (!gt.detections[v].empty())
      obs.push_back({gt.cameras[v], gt.detections[v][0]});

  for (auto _ : state) {
    cp3d::Pose3D pose =
        cp3d::solve_person(obs, cp3d::default_skeleton(), cp3d::SolverConfig{});
    benchmark::DoNotOptimize(pose.nll);
  }
}
BENCHMARK(BM_SolvePerson)->Arg(2)->Arg(4)->Arg(8);

void BM_MatchScene(benchmark::State& state) {
  cp3d::SceneSpec spec;
  spec.n_persons = static_cast<int>(state.range(0));
  spec.n_views = 4;
  spec.noise_px = 2.0;
  spec.seed = 6;
  const double side = std::max(6.0, 0.9 * std::sqrt(double(spec.n_persons)));
  spec.area = Eigen::Vector2d(side, side);
  const cp3d::GroundTruth gt = cp3d::generate(spec);
  const auto rectifiers = cp3d::world_rectifiers(gt.cameras);

  for (auto _ : state) {
    cp3d::PersonTrackSet tracks = cp3d::match_views(
        gt.detections, cp3d::default_skeleton(), rectifiers, {});
    benchmark::DoNotOptimize(tracks.persons.data());
  }
  state.SetComplexityN(spec.n_persons);
}
BENCHMARK(BM_MatchScene)->RangeMultiplier(2)->Range(8, 64)->Complexity();

}  // namespace

BENCHMARK_MAIN();
