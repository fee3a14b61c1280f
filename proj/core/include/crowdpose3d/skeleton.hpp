#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace cp3d {

/// Joint naming/ordering, bone topology, reference bone lengths and their
/// standard deviations. The bones must form a tree over the joints.
struct SkeletonSchema {
  std::vector<std::string> joint_names;          // M labels
  std::vector<std::pair<int, int>> bones;        // L = M-1 index pairs
  std::vector<double> b_ref;                     // L reference lengths (m)
  std::vector<double> sigma_bone;                // L standard deviations (m)
  std::vector<int> left_foot;                    // joint group, left foot
  std::vector<int> right_foot;                   // joint group, right foot
  int left_heel = -1;                            // ground-contact joint
  int right_heel = -1;

  int joint_count() const { return static_cast<int>(joint_names.size()); }
  int bone_count() const { return static_cast<int>(bones.size()); }

  /// Throws std::invalid_argument unless the invariants hold:
  /// tree topology, positive lengths/deviations, valid indices.
  void validate() const;

  int joint_index(const std::string& name) const;  // -1 when absent
};

/// Joint indices of the default 23-joint skeleton: the 17 MSCOCO body joints
/// followed by big toe, small toe and heel of each foot.
namespace joints {
inline constexpr int kNose = 0;
inline constexpr int kLeftEye = 1;
inline constexpr int kRightEye = 2;
inline constexpr int kLeftEar = 3;
inline constexpr int kRightEar = 4;
inline constexpr int kLeftShoulder = 5;
inline constexpr int kRightShoulder = 6;
inline constexpr int kLeftElbow = 7;
inline constexpr int kRightElbow = 8;
inline constexpr int kLeftWrist = 9;
inline constexpr int kRightWrist = 10;
inline constexpr int kLeftHip = 11;
inline constexpr int kRightHip = 12;
inline constexpr int kLeftKnee = 13;
inline constexpr int kRightKnee = 14;
inline constexpr int kLeftAnkle = 15;
inline constexpr int kRightAnkle = 16;
inline constexpr int kLeftBigToe = 17;
inline constexpr int kLeftSmallToe = 18;
inline constexpr int kLeftHeel = 19;
inline constexpr int kRightBigToe = 20;
inline constexpr int kRightSmallToe = 21;
inline constexpr int kRightHeel = 22;
inline constexpr int kCount = 23;
}  // namespace joints

/// The bundled default: COCO-17 plus 6 foot joints, average adult bone
/// lengths. Joint ordering is fixed so the file formats stay stable.
const SkeletonSchema& default_skeleton();

}  // namespace cp3d
