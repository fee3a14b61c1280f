#pragma once

#include <string>
#include <vector>

namespace cp3d {

/// One row of the `bench` timing sweep over N (persons per view / LAP size).
struct BenchRow {
  int n = 0;
  double lap_seconds = 0.0;          // one n x n solve_lap call
  double match_pair_seconds = 0.0;   // cost matrix + LAP for n vs n feet
  double solve_person_seconds = 0.0; // full scene reconstruction / n persons
};

/// Median-of-repetition timings; deterministic inputs per n.
std::vector<BenchRow> bench_sweep(const std::vector<int>& sizes,
                                  int repetitions = 5);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace cp3d
