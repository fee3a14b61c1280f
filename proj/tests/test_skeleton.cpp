#include <doctest.h>

#include "crowdpose3d/skeleton.hpp"

using namespace cp3d;

TEST_CASE("default skeleton: 23 joints, tree topology, positive lengths") {
  const SkeletonSchema& s = default_skeleton();
  CHECK(s.joint_count() == 23);
  CHECK(s.bone_count() == 22);
  CHECK_NOTHROW(s.validate());
  for (double b : s.b_ref) CHECK(b > 0.0);
  for (double sig : s.sigma_bone) CHECK(sig > 0.0);
  CHECK(s.left_heel == joints::kLeftHeel);
  CHECK(s.right_heel == joints::kRightHeel);
  CHECK(s.joint_index("nose") == joints::kNose);
  CHECK(s.joint_index("right_heel") == joints::kRightHeel);
  CHECK(s.joint_index("no_such_joint") == -1);
}

TEST_CASE("validate rejects cycles") {
  SkeletonSchema s = default_skeleton();
  s.bones.back() = {joints::kNose, joints::kLeftEye};  // duplicates an edge
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("validate rejects non-positive lengths") {
  SkeletonSchema s = default_skeleton();
  s.b_ref[3] = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("validate rejects wrong bone count") {
  SkeletonSchema s = default_skeleton();
  s.bones.pop_back();
  s.b_ref.pop_back();
  s.sigma_bone.pop_back();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
