#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "crowdpose3d/detection.hpp"
#include "crowdpose3d/homography.hpp"
#include "crowdpose3d/reconstruct.hpp"

namespace cp3d {

/// Parameters of a synthetic crowd scene.
struct SceneSpec {
  int n_persons = 5;
  int n_views = 4;
  double noise_px = 0.0;        // iid Gaussian pixel noise
  double occlusion_rate = 0.0;  // per-joint drop probability, [0, 1)
  double swap_rate = 0.0;       // per-joint probability of taking the same
                                // joint of the nearest other person, [0, 1)
  Eigen::Vector2d area{6.0, 6.0};  // ground rectangle (m), centered at origin
  std::uint64_t seed = 0;

  double min_spacing_m = 0.4;      // minimum anchor distance between persons
  double articulation_deg = 5.0;   // per-bone pose jitter
  int image_width = 1920;
  int image_height = 1080;
  double focal_px = 1100.0;
  double camera_height_m = 3.0;
  double camera_radius_m = 0.0;    // 0: derived from the area

  void validate() const;  // throws std::invalid_argument
};

/// A generated scene: ground-truth skeletons, calibrated cameras, exact
/// all-pairs ground homographies, per-view detections, and the
/// (view, detection) -> person correspondence.
struct GroundTruth {
  std::vector<Pose3D> poses3d;
  std::vector<CameraView> cameras;
  std::vector<GroundHomography> homographies;        // all ordered pairs
  std::vector<std::vector<Detection2D>> detections;  // per view
  std::map<std::pair<int, int>, int> correspondence;
};

/// Deterministic scene generation; identical spec (including seed) gives a
/// bit-identical GroundTruth. Persons are articulated template skeletons
/// whose bone lengths equal the default schema's b_ref exactly and whose
/// heels lie exactly on z = 0. Throws InfeasibleSpec when persons cannot be
/// placed at the requested density.
GroundTruth generate(const SceneSpec& spec);

}  // namespace cp3d
