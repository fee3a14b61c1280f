#include "crowdpose3d/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "crowdpose3d/lap.hpp"
#include "crowdpose3d/matching.hpp"
#include "crowdpose3d/pipeline.hpp"
#include "crowdpose3d/synth.hpp"

namespace cp3d {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Median over `repetitions` runs of fn(), where fn returns seconds per call.
double median_time(int repetitions, const std::function<double()>& fn) {
  std::vector<double> times;
  times.reserve(repetitions);
  for (int i = 0; i < repetitions; ++i) times.push_back(fn());
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

std::vector<FootPair> synthetic_feet(int view, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  std::uniform_real_distribution<double> stride(0.15, 0.4);
  std::uniform_real_distribution<double> angle(0.0, 6.28318530717958647692);
  std::vector<FootPair> feet(n);
  for (int i = 0; i < n; ++i) {
    feet[i].view = view;
    feet[i].index = i;
    feet[i].anchor = Point2(pos(rng), pos(rng));
    const double a = angle(rng);
    feet[i].stride = stride(rng) * Eigen::Vector2d(std::cos(a), std::sin(a));
  }
  return feet;
}

}  // namespace

std::vector<BenchRow> bench_sweep(const std::vector<int>& sizes,
                                  int repetitions) {
  std::vector<BenchRow> rows;
  for (const int n : sizes) {
    BenchRow row;
    row.n = n;

    // Enough inner iterations to out-run the clock granularity at small n.
    const int inner = std::max(1, 20000 / std::max(1, n * n));

    {
      std::mt19937_64 rng(17);
      std::uniform_real_distribution<double> uni(0.0, 10.0);
      std::vector<Eigen::MatrixXd> instances(inner);
      for (auto& c : instances) {
        c.resize(n, n);
        for (int r = 0; r < n; ++r)
          for (int k = 0; k < n; ++k) c(r, k) = uni(rng);
      }
      row.lap_seconds = median_time(repetitions, [&] {
        const auto start = Clock::now();
        for (const auto& c : instances) {
          const Assignment a = solve_lap(c);
          if (a.pairs.empty()) return -1.0;
        }
        return seconds_since(start) / inner;
      });
    }

    {
      std::mt19937_64 rng(29);
      const auto feet_a = synthetic_feet(0, n, rng);
      const auto feet_b = synthetic_feet(1, n, rng);
      const GroundHomography transfer = GroundHomography::identity(1, 0);
      const EdgeWeights weights;
      row.match_pair_seconds = median_time(repetitions, [&] {
        const auto start = Clock::now();
        for (int i = 0; i < inner; ++i) {
          const Assignment a =
              match_pair(feet_a, feet_b, transfer, weights, 1e18);
          if (a.pairs.size() != static_cast<std::size_t>(n)) return -1.0;
        }
        return seconds_since(start) / inner;
      });
    }

    {
      SceneSpec spec;
      spec.n_persons = n;
      spec.n_views = 4;
      spec.noise_px = 1.0;
      spec.seed = 41;
      spec.min_spacing_m = 0.5;
      const double side = std::max(6.0, 0.9 * std::sqrt(static_cast<double>(n)));
      spec.area = Eigen::Vector2d(side, side);
      const GroundTruth gt = generate(spec);
      const auto rectifiers = world_rectifiers(gt.cameras);
      const SkeletonSchema& schema = default_skeleton();
      MatchOptions mo;
      const PersonTrackSet tracks =
          match_views(gt.detections, schema, rectifiers, mo);
      row.solve_person_seconds = median_time(std::max(1, repetitions / 2), [&] {
        const auto start = Clock::now();
        const auto poses = reconstruct_scene(tracks, gt.detections, gt.cameras,
                                             schema, SolverConfig{});
        if (poses.empty()) return -1.0;
        return seconds_since(start) / std::max<std::size_t>(1, poses.size());
      });
    }

    rows.push_back(row);
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out.precision(9);
  out << "n,lap_seconds,match_pair_seconds,solve_person_seconds\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.lap_seconds << ',' << r.match_pair_seconds << ','
        << r.solve_person_seconds << '\n';
  return out.str();
}

}  // namespace cp3d
