#include "crowdpose3d/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

namespace cp3d {

Point3 CameraView::center() const {
  // Right null vector of P, dehomogenized.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeFullV);
  Eigen::Vector4d c = svd.matrixV().col(3);
  if (std::abs(c(3)) < kHomogeneousEps)
    throw PointAtInfinity("camera center at infinity");
  return c.head<3>() / c(3);
}

Point2 project(const CameraView& camera, const Point3& point) {
  const Eigen::Vector3d h =
      camera.P * point.homogeneous();
  if (std::abs(h(2)) < kHomogeneousEps)
    throw PointAtInfinity("projected point on the principal plane");
  return h.head<2>() / h(2);
}

Eigen::VectorXd solve_homogeneous_ls(const Eigen::MatrixXd& A,
                                     double rel_gap_tol) {
  const auto rows = A.rows();
  const auto cols = A.cols();
  if (cols < 1 || rows < cols - 1)
    throw std::invalid_argument("solve_homogeneous_ls: need rows >= cols - 1");

  if (cols == 1) {
    if (!A.allFinite()) throw DegenerateSystem("non-finite coefficients");
    return Eigen::VectorXd::Ones(1);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();

  // The solution is unique only when the smallest singular value is isolated.
  // s has min(rows, cols) entries; with rows == cols - 1 the implicit extra
  // singular value is 0 and the nullspace is at least one-dimensional.
  const double smax = s(0);
  if (rows >= cols) {
    const double gap = s(cols - 2) - s(cols - 1);
    if (!(gap > rel_gap_tol * smax) || smax == 0.0)
      throw DegenerateSystem("smallest singular values too close");
  } else {
    if (!(s(cols - 2) > rel_gap_tol * smax) || smax == 0.0)
      throw DegenerateSystem("nullspace dimension > 1");
  }

  Eigen::VectorXd x = svd.matrixV().col(cols - 1);
  x.normalize();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > 1e-12) {
      if (x(i) < 0.0) x = -x;
      break;
    }
  }
  return x;
}

}  // namespace cp3d
