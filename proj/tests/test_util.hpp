// Shared helpers for the test suites: deterministic random geometry,
// brute-force oracles, and finite differences.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include "crowdpose3d/geometry.hpp"
#include "crowdpose3d/lap.hpp"

namespace cp3d::testutil {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& g, int rows, int cols,
                                     double lo = 0.0, double hi = 10.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = uniform(g, lo, hi);
  return m;
}

/// A random finite projective camera: K [R | t] with rotation from a random
/// axis-angle, guaranteed rank 3.
inline CameraView random_camera(std::mt19937_64& g, int id = 0) {
  const Eigen::Vector3d axis =
      Eigen::Vector3d(uniform(g, -1, 1), uniform(g, -1, 1), uniform(g, -1, 1))
          .normalized();
  const Eigen::Matrix3d R =
      Eigen::AngleAxisd(uniform(g, -3.0, 3.0), axis).toRotationMatrix();
  Eigen::Matrix3d K = Eigen::Matrix3d::Identity();
  K(0, 0) = uniform(g, 500, 1500);
  K(1, 1) = K(0, 0) * uniform(g, 0.95, 1.05);
  K(0, 2) = uniform(g, 400, 1000);
  K(1, 2) = uniform(g, 300, 700);

  CameraView cam;
  cam.id = id;
  cam.width = 1920;
  cam.height = 1080;
  cam.P.leftCols<3>() = K * R;
  cam.P.col(3) =
      K * Eigen::Vector3d(uniform(g, -2, 2), uniform(g, -2, 2), uniform(g, 4, 12));
  return cam;
}

/// A random well-conditioned homography (entries in [-1, 1], det bounded away
/// from zero).
inline Eigen::Matrix3d random_homography(std::mt19937_64& g) {
  while (true) {
    Eigen::Matrix3d H;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) H(r, c) = uniform(g, -1.0, 1.0);
    H(2, 2) = uniform(g, 0.8, 1.2);
    if (std::abs(H.determinant()) > 0.05) return H;
  }
}

/// Exhaustive minimum assignment cost over all min(n,m)-pair injections.
inline double brute_force_lap(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  double best = std::numeric_limits<double>::infinity();
  if (n <= m) {
    std::vector<int> cols(m);
    for (int j = 0; j < m; ++j) cols[j] = j;
    std::sort(cols.begin(), cols.end());
    do {
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += cost(i, cols[i]);
      best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
  } else {
    std::vector<int> rows(n);
    for (int i = 0; i < n; ++i) rows[i] = i;
    do {
      double total = 0.0;
      for (int j = 0; j < m; ++j) total += cost(rows[j], j);
      best = std::min(best, total);
    } while (std::next_permutation(rows.begin(), rows.end()));
  }
  return best;
}

/// Central finite differences of a vector-valued function.
template <typename Fn>
Eigen::MatrixXd finite_difference_jacobian(const Fn& fn,
                                           const Eigen::VectorXd& x,
                                           double h = 1e-6) {
  const Eigen::VectorXd r0 = fn(x);
  Eigen::MatrixXd J(r0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    J.col(i) = (fn(xp) - fn(xm)) / (2.0 * h);
  }
  return J;
}

}  // namespace cp3d::testutil
