#include "crowdpose3d/skeleton.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

namespace cp3d {

namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

void SkeletonSchema::validate() const {
  const int m = joint_count();
  const int l = bone_count();
  if (m < 2) throw std::invalid_argument("skeleton: need at least 2 joints");
  if (l != m - 1)
    throw std::invalid_argument("skeleton: tree requires L = M - 1 bones");
  if (static_cast<int>(b_ref.size()) != l ||
      static_cast<int>(sigma_bone.size()) != l)
    throw std::invalid_argument("skeleton: b_ref/sigma_bone size mismatch");

  DisjointSet ds(m);
  for (int i = 0; i < l; ++i) {
    const auto [a, b] = bones[i];
    if (a < 0 || a >= m || b < 0 || b >= m || a == b)
      throw std::invalid_argument("skeleton: bad bone indices");
    if (!ds.unite(a, b))
      throw std::invalid_argument("skeleton: bones contain a cycle");
    if (!(b_ref[i] > 0.0) || !(sigma_bone[i] > 0.0))
      throw std::invalid_argument("skeleton: lengths and sigmas must be > 0");
  }
  // L = M - 1 acyclic edges over M nodes implies connectivity.

  auto check_joint = [m](int j, const char* what) {
    if (j < 0 || j >= m)
      throw std::invalid_argument(std::string("skeleton: bad index for ") + what);
  };
  check_joint(left_heel, "left_heel");
  check_joint(right_heel, "right_heel");
  for (int j : left_foot) check_joint(j, "left_foot");
  for (int j : right_foot) check_joint(j, "right_foot");
}

int SkeletonSchema::joint_index(const std::string& name) const {
  for (int i = 0; i < joint_count(); ++i)
    if (joint_names[i] == name) return i;
  return -1;
}

const SkeletonSchema& default_skeleton() {
  static const SkeletonSchema schema = [] {
    SkeletonSchema s;
    s.joint_names = {
        "nose",           "left_eye",       "right_eye",     "left_ear",
        "right_ear",      "left_shoulder",  "right_shoulder", "left_elbow",
        "right_elbow",    "left_wrist",     "right_wrist",   "left_hip",
        "right_hip",      "left_knee",      "right_knee",    "left_ankle",
        "right_ankle",    "left_big_toe",   "left_small_toe", "left_heel",
        "right_big_toe",  "right_small_toe", "right_heel"};

    using namespace joints;
    // A tree: head and arms hang off the shoulders, legs off the hips,
    // the two body halves join through the nose. No shoulder-shoulder or
    // hip-hip edge, which would close a cycle.
    struct BoneDef {
      int a, b;
      double length, sigma;
    };
    const double kLimbSigma = 0.05;
    const double kTorsoSigma = 0.03;
    const BoneDef defs[] = {
        {kNose, kLeftEye, 0.045, kTorsoSigma},
        {kNose, kRightEye, 0.045, kTorsoSigma},
        {kLeftEye, kLeftEar, 0.080, kTorsoSigma},
        {kRightEye, kRightEar, 0.080, kTorsoSigma},
        {kNose, kLeftShoulder, 0.250, kTorsoSigma},
        {kNose, kRightShoulder, 0.250, kTorsoSigma},
        {kLeftShoulder, kLeftElbow, 0.280, kLimbSigma},
        {kRightShoulder, kRightElbow, 0.280, kLimbSigma},
        {kLeftElbow, kLeftWrist, 0.250, kLimbSigma},
        {kRightElbow, kRightWrist, 0.250, kLimbSigma},
        {kLeftShoulder, kLeftHip, 0.500, kTorsoSigma},
        {kRightShoulder, kRightHip, 0.500, kTorsoSigma},
        {kLeftHip, kLeftKnee, 0.420, kLimbSigma},
        {kRightHip, kRightKnee, 0.420, kLimbSigma},
        {kLeftKnee, kLeftAnkle, 0.410, kLimbSigma},
        {kRightKnee, kRightAnkle, 0.410, kLimbSigma},
        {kLeftAnkle, kLeftBigToe, 0.180, kLimbSigma},
        {kRightAnkle, kRightBigToe, 0.180, kLimbSigma},
        {kLeftAnkle, kLeftSmallToe, 0.160, kLimbSigma},
        {kRightAnkle, kRightSmallToe, 0.160, kLimbSigma},
        {kLeftAnkle, kLeftHeel, 0.080, kLimbSigma},
        {kRightAnkle, kRightHeel, 0.080, kLimbSigma},
    };
    for (const auto& d : defs) {
      s.bones.emplace_back(d.a, d.b);
      s.b_ref.push_back(d.length);
      s.sigma_bone.push_back(d.sigma);
    }

    s.left_foot = {kLeftAnkle, kLeftBigToe, kLeftSmallToe, kLeftHeel};
    s.right_foot = {kRightAnkle, kRightBigToe, kRightSmallToe, kRightHeel};
    s.left_heel = kLeftHeel;
    s.right_heel = kRightHeel;
    s.validate();
    return s;
  }();
  return schema;
}

}  // namespace cp3d
