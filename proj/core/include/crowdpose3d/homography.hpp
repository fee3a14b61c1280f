#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "crowdpose3d/geometry.hpp"

namespace cp3d {

/// View index used for the metric world ground chart (z = 0 plane, meters).
inline constexpr int kWorldFrame = -1;

/// A ground-plane homography mapping points of `from_view` into `to_view`.
/// Stored with unit Frobenius norm and a deterministic sign (H22 >= 0 when
/// |H22| is meaningful) so homographies are comparable and serialize stably.
struct GroundHomography {
  int from_view = 0;
  int to_view = 0;
  Eigen::Matrix3d H = Eigen::Matrix3d::Identity();

  static GroundHomography identity(int from_view, int to_view);
  GroundHomography inverse() const;
};

/// Unit-Frobenius-norm copy with the sign convention applied.
Eigen::Matrix3d normalize_homography(const Eigen::Matrix3d& H);

/// DLT estimate with Hartley normalization from >= 4 (src, dst)
/// correspondences. The result maps src points to dst points.
/// Throws DegenerateConfiguration for < 4 pairs or 3 collinear points,
/// NumericalFailure when the SVD kernel is not unique.
GroundHomography estimate_homography(
    const std::vector<std::pair<Point2, Point2>>& correspondences,
    int from_view = 0, int to_view = 0);

/// H * [p;1], dehomogenized. Throws PointAtInfinity.
Point2 rectify(const GroundHomography& h, const Point2& p);

/// Consistency score for a homography triple j->k, k->l, j->l:
/// || normalize(H_jl) - normalize(H_jk * H_kl) ||_F. Near zero when the
/// three are mutually consistent. Throws IndexMismatch.
double compose_check(const GroundHomography& h_jk, const GroundHomography& h_kl,
                     const GroundHomography& h_jl);

/// Exact homography induced by the z = 0 plane between two calibrated views:
/// maps cam_b pixels of ground points to cam_a pixels.
/// Throws DegenerateGeometry when a camera's ground chart is singular.
GroundHomography ground_homography_from_cameras(const CameraView& cam_a,
                                                const CameraView& cam_b);

/// Chart of the z = 0 world plane in a view: maps the view's pixels of
/// ground points to world (x, y) meters; to_view is kWorldFrame.
GroundHomography ground_plane_chart(const CameraView& cam);

}  // namespace cp3d
