#include <cmath>

#include "crowdpose3d/reconstruct.hpp"

namespace cp3d {

Point3 triangulate_dlt(
    const std::vector<std::pair<CameraView, Point2>>& observations) {
  const std::size_t n = observations.size();
  if (n < 2)
    throw std::invalid_argument("triangulate_dlt: need >= 2 observations");

  Eigen::MatrixXd A(2 * n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    const Mat34& P = observations[i].first.P;
    const Point2& q = observations[i].second;
    A.row(2 * i) = q.x() * P.row(2) - P.row(0);
    A.row(2 * i + 1) = q.y() * P.row(2) - P.row(1);
  }

  Eigen::VectorXd X;
  try {
    X = solve_homogeneous_ls(A, 1e-10);
  } catch (const DegenerateSystem& e) {
    throw DegenerateGeometry(std::string("triangulation: ") + e.what());
  }
  if (std::abs(X(3)) < kHomogeneousEps)
    throw PointAtInfinity("triangulated point at infinity");
  return X.head<3>() / X(3);
}

}  // namespace cp3d
