#include <doctest.h>

#include <Eigen/Dense>

#include "crowdpose3d/homography.hpp"
#include "test_util.hpp"

using namespace cp3d;

namespace {

Point2 apply(const Eigen::Matrix3d& H, const Point2& p) {
  const Eigen::Vector3d q = H * p.homogeneous();
  return q.head<2>() / q.z();
}

std::vector<std::pair<Point2, Point2>> planted_pairs(const Eigen::Matrix3d& H,
                                                     std::mt19937_64& g,
                                                     int n) {
  std::vector<std::pair<Point2, Point2>> pairs;
  while (static_cast<int>(pairs.size()) < n) {
    const Point2 src(testutil::uniform(g, -3, 3), testutil::uniform(g, -3, 3));
    const Eigen::Vector3d q = H * src.homogeneous();
    if (std::abs(q.z()) < 0.2) continue;  // keep away from the horizon
    pairs.emplace_back(src, Point2(q.head<2>() / q.z()));
  }
  return pairs;
}

}  // namespace

TEST_CASE("estimate_homography: unit square to itself gives the identity") {
  const std::vector<std::pair<Point2, Point2>> pairs = {
      {{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{1, 1}, {1, 1}}, {{0, 1}, {0, 1}}};
  const GroundHomography h = estimate_homography(pairs);
  const Eigen::Matrix3d N = h.H / h.H(2, 2);
  CHECK((N - Eigen::Matrix3d::Identity()).norm() < 1e-9);
}

TEST_CASE("estimate_homography: pure scaling") {
  const std::vector<std::pair<Point2, Point2>> pairs = {
      {{0, 0}, {0, 0}}, {{1, 0}, {2, 0}}, {{1, 1}, {2, 2}}, {{0, 1}, {0, 2}}};
  const GroundHomography h = estimate_homography(pairs);
  const Eigen::Matrix3d expect =
      normalize_homography(Eigen::Vector3d(2, 2, 1).asDiagonal().toDenseMatrix());
  CHECK((h.H - expect).norm() < 1e-9);
}

TEST_CASE("estimate_homography: recovers a planted homography") {
  auto g = testutil::rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3d H = testutil::random_homography(g);
    const auto pairs = planted_pairs(H, g, 20);
    const GroundHomography est = estimate_homography(pairs);
    const Eigen::Matrix3d expect = normalize_homography(H);
    CHECK((est.H - expect).norm() < 1e-8);
  }
}

TEST_CASE("estimate_homography: rejects degenerate inputs") {
  std::vector<std::pair<Point2, Point2>> three = {
      {{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}};
  CHECK_THROWS_AS(estimate_homography(three), DegenerateConfiguration);

  // four points with a collinear triple
  std::vector<std::pair<Point2, Point2>> collinear = {
      {{0, 0}, {0, 0}}, {{1, 1}, {1, 0}}, {{2, 2}, {0, 1}}, {{0, 3}, {1, 1}}};
  CHECK_THROWS_AS(estimate_homography(collinear), DegenerateConfiguration);
}

TEST_CASE("estimate_homography: invariant to similarity transforms") {
  auto g = testutil::rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Matrix3d H = testutil::random_homography(g);
    const auto pairs = planted_pairs(H, g, 12);

    // Apply a similarity on both sides.
    const double angle = testutil::uniform(g, -3, 3);
    const double scale = testutil::uniform(g, 0.2, 5.0);
    const Eigen::Vector2d t(testutil::uniform(g, -10, 10),
                            testutil::uniform(g, -10, 10));
    Eigen::Matrix2d R;
    R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    auto sim = [&](const Point2& p) { return Point2(scale * R * p + t); };

    std::vector<std::pair<Point2, Point2>> moved;
    for (const auto& [s, d] : pairs) moved.emplace_back(sim(s), sim(d));

    const GroundHomography base = estimate_homography(pairs);
    const GroundHomography transformed = estimate_homography(moved);

    // Compare after mapping a probe grid through both.
    Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
    S.topLeftCorner<2, 2>() = scale * R;
    S.topRightCorner<2, 1>() = t;
    const Eigen::Matrix3d back =
        normalize_homography(S.inverse() * transformed.H * S);
    CHECK((back - normalize_homography(base.H)).norm() < 1e-8);
  }
}

TEST_CASE("rectify: identity and scaling") {
  GroundHomography identity = GroundHomography::identity(0, 1);
  const Point2 p = rectify(identity, Point2(3.5, -2.0));
  CHECK(p.x() == doctest::Approx(3.5));
  CHECK(p.y() == doctest::Approx(-2.0));

  GroundHomography scale;
  scale.H = normalize_homography(
      Eigen::Vector3d(2, 2, 1).asDiagonal().toDenseMatrix());
  const Point2 q = rectify(scale, Point2(1, 1));
  CHECK(q.x() == doctest::Approx(2.0));
  CHECK(q.y() == doctest::Approx(2.0));
}

TEST_CASE("rectify: matches direct matrix arithmetic") {
  auto g = testutil::rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    GroundHomography h;
    h.H = normalize_homography(testutil::random_homography(g));
    const Point2 p(testutil::uniform(g, -3, 3), testutil::uniform(g, -3, 3));
    const Eigen::Vector3d q = h.H * p.homogeneous();
    if (std::abs(q.z()) < 1e-3) continue;
    CHECK((rectify(h, p) - apply(h.H, p)).norm() < 1e-12);
  }
}

TEST_CASE("rectify: point mapped to infinity raises") {
  GroundHomography h;
  h.H << 1, 0, 0, 0, 1, 0, 0, 0, 0;
  h.H = h.H / h.H.norm();
  CHECK_THROWS_AS(rectify(h, Point2(1, 1)), PointAtInfinity);
}

TEST_CASE("estimate then rectify reproduces the targets on noiseless input") {
  auto g = testutil::rng(37);
  const Eigen::Matrix3d H = testutil::random_homography(g);
  const auto pairs = planted_pairs(H, g, 10);
  const GroundHomography est = estimate_homography(pairs);
  for (const auto& [src, dst] : pairs)
    CHECK((rectify(est, src) - dst).norm() < 1e-8);
}

TEST_CASE("compose_check: identities compose to zero") {
  const auto h_jk = GroundHomography::identity(1, 0);  // k=1 -> j=0
  const auto h_kl = GroundHomography::identity(2, 1);  // l=2 -> k=1
  const auto h_jl = GroundHomography::identity(2, 0);  // l=2 -> j=0
  CHECK(compose_check(h_jk, h_kl, h_jl) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("compose_check: planted composition is consistent") {
  auto g = testutil::rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    GroundHomography h_kl, h_jk, h_jl;
    h_kl.from_view = 2;
    h_kl.to_view = 1;
    h_kl.H = normalize_homography(testutil::random_homography(g));
    h_jk.from_view = 1;
    h_jk.to_view = 0;
    h_jk.H = normalize_homography(testutil::random_homography(g));
    h_jl.from_view = 2;
    h_jl.to_view = 0;
    h_jl.H = normalize_homography(h_jk.H * h_kl.H);
    CHECK(compose_check(h_jk, h_kl, h_jl) < 1e-8);

    // A 1% perturbation must be visible.
    GroundHomography perturbed = h_jl;
    Eigen::Matrix3d noise = testutil::random_homography(g);
    perturbed.H = normalize_homography(h_jl.H + 0.01 * noise / noise.norm());
    CHECK(compose_check(h_jk, h_kl, perturbed) > 1e-3);
  }
}

TEST_CASE("compose_check: mismatched indices raise") {
  const auto h_jk = GroundHomography::identity(1, 0);
  const auto h_kl = GroundHomography::identity(2, 1);
  const auto wrong = GroundHomography::identity(3, 0);
  CHECK_THROWS_AS(compose_check(h_jk, h_kl, wrong), IndexMismatch);
}

TEST_CASE("normalize_homography: unit norm, stable sign, det guard") {
  auto g = testutil::rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3d H = testutil::random_homography(g);
    const Eigen::Matrix3d N = normalize_homography(H);
    CHECK(std::abs(N.norm() - 1.0) < 1e-12);
    const Eigen::Matrix3d N2 = normalize_homography(-3.7 * H);
    CHECK((N - N2).norm() < 1e-12);
  }
}
