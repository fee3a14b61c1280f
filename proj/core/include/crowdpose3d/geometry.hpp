#pragma once

#include <Eigen/Core>
#include <vector>

#include "crowdpose3d/errors.hpp"

namespace cp3d {

using Point2 = Eigen::Vector2d;   // pixels, or rectified ground-plane units
using Point3 = Eigen::Vector3d;   // meters
using Mat34 = Eigen::Matrix<double, 3, 4>;

/// Homogeneous coordinates below which a point counts as being at infinity.
inline constexpr double kHomogeneousEps = 1e-12;

/// A calibrated camera: 3x4 projection matrix in pixel units plus image size.
struct CameraView {
  int id = 0;
  Mat34 P = Mat34::Zero();
  int width = 0;
  int height = 0;

  /// Camera center C with P * [C;1] = 0 (finite cameras only).
  Point3 center() const;
};

/// Perspective projection of a 3D point (meters) to pixels.
/// Throws PointAtInfinity when the point lies on the principal plane.
Point2 project(const CameraView& camera, const Point3& point);

/// Unit-norm x minimizing ||A x||_2, i.e. the right singular vector of the
/// smallest singular value. Sign convention: first component with magnitude
/// above 1e-12 is positive. Requires rows >= cols - 1.
/// Throws DegenerateSystem when the two smallest singular values are closer
/// than `rel_gap_tol` relative to the largest one (solution not unique).
Eigen::VectorXd solve_homogeneous_ls(const Eigen::MatrixXd& A,
                                     double rel_gap_tol = 1e-12);

}  // namespace cp3d
