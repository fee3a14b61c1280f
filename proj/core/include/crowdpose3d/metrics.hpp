#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crowdpose3d/detection.hpp"
#include "crowdpose3d/matching.hpp"
#include "crowdpose3d/reconstruct.hpp"
#include "crowdpose3d/skeleton.hpp"

namespace cp3d {

/// Joint-error statistics in millimeters, grouped as Head / Shoulder /
/// Elbow / Wrist / Hip / Knee / Foot plus the overall average.
struct MpjpeReport {
  double average_mm = 0.0;
  std::map<std::string, double> per_group_mm;
};

/// Percentage of correct parts, grouped as Head / Torso / Upper arms /
/// Lower arms / Upper legs / Lower legs plus the overall percentage.
struct PcpReport {
  double overall = 0.0;
  std::map<std::string, double> per_part;
};

/// MSCOCO-style keypoint AP/AR at OKS thresholds .50:.05:.95.
struct OksReport {
  double ap = 0.0, ap50 = 0.0, ap75 = 0.0, ap_medium = 0.0, ap_large = 0.0;
  double ar = 0.0, ar50 = 0.0, ar75 = 0.0, ar_medium = 0.0, ar_large = 0.0;
};

struct ReprojStats {
  double ave = 0.0, min = 0.0, max = 0.0, var = 0.0;  // pixels
  double bin_width_px = 0.0;
  std::vector<int> histogram;  // bin i covers [i * bin_width, (i+1) * bin_width)
};

struct EvalReport {
  std::optional<MpjpeReport> mpjpe;
  std::optional<PcpReport> pcp;
  std::optional<OksReport> oks;
  std::optional<ReprojStats> reproj;
  std::optional<double> matching_precision;
};

/// Pairs predicted and ground-truth persons by nearest mid-hip distance
/// (greedy, 0.5 m gate). Returns (pred index, gt index) pairs.
std::vector<std::pair<int, int>> match_poses_by_root(
    const std::vector<Pose3D>& pred, const std::vector<Pose3D>& gt,
    double gate_m = 0.5);

/// Mean per-joint position error in millimeters over matched persons.
/// Throws NoMatches when nothing can be compared.
MpjpeReport mpjpe(const std::vector<Pose3D>& pred, const std::vector<Pose3D>& gt,
                  const SkeletonSchema& schema);

/// A part counts as correct when both endpoint errors are within
/// threshold_frac of the ground-truth part length.
PcpReport pcp(const std::vector<Pose3D>& pred, const std::vector<Pose3D>& gt,
              const SkeletonSchema& schema, double threshold_frac = 0.5);

/// Per-joint OKS falloff constants (MSCOCO k = 2 * sigma convention); the
/// 6 foot joints reuse the ankle constant by default.
std::vector<double> default_oks_kappas(const SkeletonSchema& schema);

/// One person's 2D keypoints in one image, for OKS scoring.
struct PersonKeypoints2D {
  std::vector<std::optional<Point2>> joints;
  double bbox_area = 0.0;  // scale s^2; ground-truth boxes drive size splits
};
struct OksFrame {
  std::vector<PersonKeypoints2D> pred;
  std::vector<PersonKeypoints2D> gt;
};

/// Object keypoint similarity between a prediction and a ground truth:
/// mean over labeled gt joints of exp(-d^2 / (2 s^2 kappa^2)).
/// Throws MissingConstants when kappas do not cover the joints.
double oks(const PersonKeypoints2D& pred, const PersonKeypoints2D& gt,
           const std::vector<double>& kappas);

/// AP/AR over OKS thresholds .50:.05:.95 with greedy per-frame matching,
/// plus medium/large splits by ground-truth box area (MSCOCO limits).
OksReport oks_ap_ar(const std::vector<OksFrame>& frames,
                    const std::vector<double>& kappas);

/// Fraction of cross-view links inside person hypotheses that connect
/// detections of the same ground-truth person. Links are all within-person
/// (view, detection) pairs. Throws NoGroundTruth when the correspondence
/// does not cover the tracks.
double matching_precision(
    const PersonTrackSet& tracks,
    const std::map<std::pair<int, int>, int>& gt_correspondence);

/// Reprojection distances of reconstructed joints against the 2D inputs.
ReprojStats reproj_stats(
    const std::vector<Pose3D>& poses, const PersonTrackSet& tracks,
    const std::vector<std::vector<Detection2D>>& detections_per_view,
    const std::vector<CameraView>& cameras, int bins = 50);

}  // namespace cp3d
