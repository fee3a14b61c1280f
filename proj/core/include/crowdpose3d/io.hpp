#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "crowdpose3d/detection.hpp"
#include "crowdpose3d/geometry.hpp"
#include "crowdpose3d/homography.hpp"
#include "crowdpose3d/matching.hpp"
#include "crowdpose3d/metrics.hpp"
#include "crowdpose3d/reconstruct.hpp"
#include "crowdpose3d/skeleton.hpp"
#include "crowdpose3d/synth.hpp"

namespace cp3d {

/// Raised on malformed input files; the message names the path.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

// Calibration: JSON array of {"id", "P" (3x4), "width", "height"}.
std::vector<CameraView> load_calibration(const std::string& path);
void save_calibration(const std::string& path,
                      const std::vector<CameraView>& cameras);

// Skeleton schema with the documented field names.
SkeletonSchema load_skeleton(const std::string& path);
void save_skeleton(const std::string& path, const SkeletonSchema& schema);

/// Detections of one frame, indexed by view id.
using FrameDetections = std::vector<std::vector<Detection2D>>;

// Detections: JSON array of frames; a frame is an array of
// {"view", "persons": [{"bbox": [x,y,w,h], "joints": [[x,y,conf]|null x M]}]}.
// Joint uncertainties are filled from the sigma model on load.
std::vector<FrameDetections> load_detections(const std::string& path,
                                             const SkeletonSchema& schema,
                                             const SigmaModel& sigma_cfg = {});
void save_detections(const std::string& path,
                     const std::vector<FrameDetections>& frames);

// Ground-plane correspondences: JSON array of
// {"view_a", "view_b", "points": [[xa, ya, xb, yb], ...]}; (xb, yb) lives in
// view_b and maps to (xa, ya) in view_a, matching the stored homography
// direction from_view = view_b, to_view = view_a.
struct GroundCorrespondences {
  int view_a = 0;
  int view_b = 0;
  std::vector<std::pair<Point2, Point2>> points;  // (in view_b, in view_a)
};
std::vector<GroundCorrespondences> load_ground_correspondences(
    const std::string& path);
void save_ground_correspondences(const std::string& path,
                                 const std::vector<GroundCorrespondences>& sets);

// Homography cache, full double precision.
std::vector<GroundHomography> load_homographies(const std::string& path);
void save_homographies(const std::string& path,
                       const std::vector<GroundHomography>& hs);

/// Reconstructed poses of one frame.
struct FramePoses {
  int frame = 0;
  std::vector<Pose3D> persons;
};

/// Canonical pose JSON (fixed key order, shortest round-trip floats): two
/// identical runs produce byte-identical output.
std::string poses_to_json(const std::vector<FramePoses>& frames);
void save_poses(const std::string& path, const std::vector<FramePoses>& frames);
std::vector<FramePoses> load_poses(const std::string& path);

void save_tracks(const std::string& path, const PersonTrackSet& tracks);
PersonTrackSet load_tracks(const std::string& path);

void save_correspondence(const std::string& path,
                         const std::map<std::pair<int, int>, int>& map);
std::map<std::pair<int, int>, int> load_correspondence(const std::string& path);

void save_eval_report(const std::string& json_path, const EvalReport& report);
void save_eval_report_csv(const std::string& csv_path, const EvalReport& report);
void save_histogram_csv(const std::string& csv_path, const ReprojStats& stats);

/// Writes every artifact of a synthetic scene into a directory using the
/// CLI file formats: calibration.json, detections.json, homographies.json,
/// gt_poses.json, gt_correspondence.json, skeleton.json.
void export_scene(const std::string& dir, const GroundTruth& gt);

}  // namespace cp3d
