#include "crowdpose3d/homography.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace cp3d {

namespace {

// Hartley normalization: translate to the centroid, scale so the mean
// distance from it is sqrt(2). Returns the 3x3 similarity.
Eigen::Matrix3d conditioning_transform(const std::vector<Point2>& pts) {
  Point2 centroid = Point2::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());

  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<double>(pts.size());

  const double scale = mean_dist > 1e-15 ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d T = Eigen::Matrix3d::Identity();
  T(0, 0) = T(1, 1) = scale;
  T(0, 2) = -scale * centroid.x();
  T(1, 2) = -scale * centroid.y();
  return T;
}

// Rejects point sets with 3 (near-)collinear members, measured against the
// bounding-box area so the test is scale free.
void check_not_collinear(const std::vector<Point2>& pts, const char* side) {
  Point2 lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double bbox_area = (hi - lo).prod();
  if (!(bbox_area > 0.0))
    throw DegenerateConfiguration(std::string(side) +
                                  " points span a degenerate bounding box");

  const std::size_t n = pts.size();
  for (std::size_t i = 0; i + 2 < n; ++i)
    for (std::size_t j = i + 1; j + 1 < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const Point2 u = pts[j] - pts[i];
        const Point2 v = pts[k] - pts[i];
        const double area = 0.5 * std::abs(u.x() * v.y() - u.y() * v.x());
        if (area <= 1e-9 * bbox_area)
          throw DegenerateConfiguration(std::string(side) +
                                        " points contain a collinear triple");
      }
}

}  // namespace

Eigen::Matrix3d normalize_homography(const Eigen::Matrix3d& H) {
  const double norm = H.norm();
  if (!(norm > 0.0) || !H.allFinite())
    throw NumericalFailure("homography has zero or non-finite norm");
  Eigen::Matrix3d N = H / norm;
  double pivot = N(2, 2);
  if (std::abs(pivot) <= 1e-9) {
    // Fall back to the entry of largest magnitude for the sign.
    Eigen::Index r, c;
    N.cwiseAbs().maxCoeff(&r, &c);
    pivot = N(r, c);
  }
  if (pivot < 0.0) N = -N;
  return N;
}

GroundHomography GroundHomography::identity(int from_view, int to_view) {
  GroundHomography g;
  g.from_view = from_view;
  g.to_view = to_view;
  g.H = normalize_homography(Eigen::Matrix3d::Identity());
  return g;
}

GroundHomography GroundHomography::inverse() const {
  GroundHomography g;
  g.from_view = to_view;
  g.to_view = from_view;
  const double det = H.determinant();
  if (std::abs(det) <= 1e-10)
    throw NumericalFailure("homography not invertible");
  g.H = normalize_homography(H.inverse());
  return g;
}

GroundHomography estimate_homography(
    const std::vector<std::pair<Point2, Point2>>& correspondences,
    int from_view, int to_view) {
  const std::size_t n = correspondences.size();
  if (n < 4)
    throw DegenerateConfiguration("need >= 4 point correspondences");

  std::vector<Point2> src(n), dst(n);
  for (std::size_t i = 0; i < n; ++i) {
    src[i] = correspondences[i].first;
    dst[i] = correspondences[i].second;
  }
  check_not_collinear(src, "source");
  check_not_collinear(dst, "destination");

  const Eigen::Matrix3d Ts = conditioning_transform(src);
  const Eigen::Matrix3d Td = conditioning_transform(dst);

  // Standard 2n x 9 DLT system on the conditioned points.
  Eigen::MatrixXd A(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d s = Ts * src[i].homogeneous();
    const Eigen::Vector3d d = Td * dst[i].homogeneous();
    A.row(2 * i) << 0, 0, 0, -d.z() * s.transpose(), d.y() * s.transpose();
    A.row(2 * i + 1) << d.z() * s.transpose(), 0, 0, 0, -d.x() * s.transpose();
  }

  Eigen::VectorXd h;
  try {
    h = solve_homogeneous_ls(A);
  } catch (const DegenerateSystem& e) {
    throw NumericalFailure(std::string("homography kernel: ") + e.what());
  }

  Eigen::Matrix3d Hn;
  Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

  GroundHomography g;
  g.from_view = from_view;
  g.to_view = to_view;
  g.H = normalize_homography(Td.inverse() * Hn * Ts);
  if (std::abs(g.H.determinant()) <= 1e-10)
    throw DegenerateConfiguration("estimated homography is singular");
  return g;
}

Point2 rectify(const GroundHomography& h, const Point2& p) {
  const Eigen::Vector3d q = h.H * p.homogeneous();
  if (std::abs(q.z()) < kHomogeneousEps)
    throw PointAtInfinity("rectified point at infinity");
  return q.head<2>() / q.z();
}

double compose_check(const GroundHomography& h_jk, const GroundHomography& h_kl,
                     const GroundHomography& h_jl) {
  // h_jk: k -> j, h_kl: l -> k, h_jl: l -> j.
  if (h_jk.to_view != h_jl.to_view || h_jk.from_view != h_kl.to_view ||
      h_kl.from_view != h_jl.from_view)
    throw IndexMismatch("homography view indices do not chain j->k->l");
  const Eigen::Matrix3d composed = normalize_homography(h_jk.H * h_kl.H);
  return (normalize_homography(h_jl.H) - composed).norm();
}

namespace {

// P * E, with E embedding ground coordinates (x, y) -> (x, y, 0, 1).
Eigen::Matrix3d ground_chart_to_pixels(const CameraView& cam) {
  Eigen::Matrix3d G;
  G.col(0) = cam.P.col(0);
  G.col(1) = cam.P.col(1);
  G.col(2) = cam.P.col(3);
  return G;
}

}  // namespace

GroundHomography ground_homography_from_cameras(const CameraView& cam_a,
                                                const CameraView& cam_b) {
  const Eigen::Matrix3d Ga = ground_chart_to_pixels(cam_a);
  const Eigen::Matrix3d Gb = ground_chart_to_pixels(cam_b);

  Eigen::FullPivLU<Eigen::Matrix3d> lu(Gb);
  if (!lu.isInvertible())
    throw DegenerateGeometry("camera ground chart is singular");

  GroundHomography g;
  g.from_view = cam_b.id;
  g.to_view = cam_a.id;
  g.H = normalize_homography(Ga * lu.inverse());
  return g;
}

GroundHomography ground_plane_chart(const CameraView& cam) {
  const Eigen::Matrix3d G = ground_chart_to_pixels(cam);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(G);
  if (!lu.isInvertible())
    throw DegenerateGeometry("camera ground chart is singular");

  GroundHomography g;
  g.from_view = cam.id;
  g.to_view = kWorldFrame;
  g.H = normalize_homography(lu.inverse());
  return g;
}

}  // namespace cp3d
