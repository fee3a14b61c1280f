#include <doctest.h>

#include <Eigen/Dense>

#include "crowdpose3d/geometry.hpp"
#include "test_util.hpp"

using namespace cp3d;

namespace {

CameraView canonical_camera() {
  CameraView cam;
  cam.P.setZero();
  cam.P(0, 0) = cam.P(1, 1) = cam.P(2, 2) = 1.0;
  cam.width = 640;
  cam.height = 480;
  return cam;
}

}  // namespace

TEST_CASE("project: canonical camera maps the optical axis to the origin") {
  const CameraView cam = canonical_camera();
  const Point2 p = project(cam, Point3(0, 0, 1));
  CHECK(p.x() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.y() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("project: perspective division") {
  const CameraView cam = canonical_camera();
  const Point2 p = project(cam, Point3(2, 4, 2));
  CHECK(p.x() == doctest::Approx(1.0));
  CHECK(p.y() == doctest::Approx(2.0));
}

TEST_CASE("project: point on the principal plane raises") {
  const CameraView cam = canonical_camera();
  CHECK_THROWS_AS(project(cam, Point3(1, 1, 0)), PointAtInfinity);
}

TEST_CASE("project: agrees with direct homogeneous arithmetic") {
  auto g = testutil::rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const CameraView cam = testutil::random_camera(g);
    const Point3 q(testutil::uniform(g, -5, 5), testutil::uniform(g, -5, 5),
                   testutil::uniform(g, -5, 5));
    const Eigen::Vector3d h = cam.P * q.homogeneous();
    if (std::abs(h.z()) < 1e-6) continue;
    const Point2 expect = h.head<2>() / h.z();
    const Point2 got = project(cam, q);
    CHECK((got - expect).norm() < 1e-12 * std::max(1.0, expect.norm()));
  }
}

TEST_CASE("project: scale invariance in P") {
  auto g = testutil::rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    CameraView cam = testutil::random_camera(g);
    const Point3 q(testutil::uniform(g, -5, 5), testutil::uniform(g, -5, 5),
                   testutil::uniform(g, 1, 5));
    const Point2 a = project(cam, q);
    CameraView scaled = cam;
    scaled.P *= testutil::uniform(g, 0.1, 10.0);
    const Point2 b = project(scaled, q);
    CHECK((a - b).norm() < 1e-9);
  }
}

TEST_CASE("solve_homogeneous_ls: planted nullspace vector") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 0;
  const Eigen::VectorXd x = solve_homogeneous_ls(A);
  CHECK(x(0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(x(1) == doctest::Approx(1.0));
}

TEST_CASE("solve_homogeneous_ls: isotropic matrix is degenerate") {
  CHECK_THROWS_AS(solve_homogeneous_ls(Eigen::MatrixXd::Identity(3, 3)),
                  DegenerateSystem);
}

TEST_CASE("solve_homogeneous_ls: recovers a planted nullspace") {
  auto g = testutil::rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd null_vec(4);
    for (int i = 0; i < 4; ++i) null_vec(i) = testutil::uniform(g, -1, 1);
    null_vec.normalize();

    // Rows orthogonal to null_vec: r = raw - (raw . n) n.
    Eigen::MatrixXd A(8, 4);
    for (int r = 0; r < 8; ++r) {
      Eigen::VectorXd raw(4);
      for (int i = 0; i < 4; ++i) raw(i) = testutil::uniform(g, -2, 2);
      A.row(r) = (raw - raw.dot(null_vec) * null_vec).transpose();
    }

    const Eigen::VectorXd x = solve_homogeneous_ls(A);
    CHECK(std::abs(x.norm() - 1.0) < 1e-12);
    CHECK((A * x).norm() < 1e-10);
    CHECK(std::min((x - null_vec).norm(), (x + null_vec).norm()) < 1e-9);
  }
}

TEST_CASE("solve_homogeneous_ls: unit norm and sign convention") {
  auto g = testutil::rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd A = testutil::random_matrix(g, 10, 5, -1, 1);
    Eigen::VectorXd x;
    try {
      x = solve_homogeneous_ls(A);
    } catch (const DegenerateSystem&) {
      continue;
    }
    CHECK(std::abs(x.norm() - 1.0) < 1e-12);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x(i)) > 1e-12) {
        CHECK(x(i) > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("solve_homogeneous_ls: rejects undersized systems") {
  CHECK_THROWS_AS(solve_homogeneous_ls(Eigen::MatrixXd::Ones(2, 4)),
                  std::invalid_argument);
}
