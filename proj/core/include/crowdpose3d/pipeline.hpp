#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crowdpose3d/io.hpp"
#include "crowdpose3d/matching.hpp"
#include "crowdpose3d/metrics.hpp"
#include "crowdpose3d/reconstruct.hpp"
#include "crowdpose3d/synth.hpp"

namespace cp3d {

/// Everything the pipeline needs; a JSON config file carries the same keys
/// and individual CLI flags override single fields.
struct PipelineConfig {
  std::string calibration_path;
  std::string detections_path;
  std::string schema_path;          // empty: bundled default skeleton
  std::string correspondences_path; // ground-plane annotation (match stage)
  std::string homographies_path;    // cached homographies (match stage)
  std::string gt_poses_path;        // optional 3D ground truth
  std::string gt_correspondence_path;
  std::string output_dir = "out";
  std::string dump_matching_dir;

  EdgeWeights weights;
  double gate = 1.0;                 // rectified units (meters on the world chart)
  double min_heel_confidence = 0.05;
  SolverConfig solver;
  SigmaModel sigma;
  SceneSpec scene;                   // `synth` subcommand
  int threads = 1;

  void validate() const;  // throws std::invalid_argument
};

PipelineConfig load_pipeline_config(const std::string& path);

/// Per-view rectifying homographies into the metric world ground chart.
std::map<int, GroundHomography> world_rectifiers(
    const std::vector<CameraView>& cameras);

/// Per-view rectifiers into the lowest view's ground chart, composed along
/// the available pairwise homographies. Throws DegenerateConfiguration when
/// some view is unreachable.
std::map<int, GroundHomography> compose_rectifiers(
    const std::vector<GroundHomography>& pairwise);

struct MatchOptions {
  EdgeWeights weights;
  double gate = 1.0;
  double min_heel_confidence = 0.05;
  LapAlgorithm algorithm = LapAlgorithm::kJonkerVolgenant;
  std::string dump_dir;  // empty: no cost-matrix dump
  int frame_index = 0;
};

/// The full matching stage of one frame: foot-pair extraction per view,
/// pairwise assignment over the view ring, cycle-consistent merge.
/// Detections without usable feet become singleton persons.
PersonTrackSet match_views(const FrameDetections& detections,
                           const SkeletonSchema& schema,
                           const std::map<int, GroundHomography>& rectifiers,
                           const MatchOptions& options);

struct FrameResult {
  int frame = 0;
  PersonTrackSet tracks;
  std::vector<Pose3D> poses;
  SceneDiagnostics diagnostics;
};

FrameResult process_frame(int frame_index, const FrameDetections& detections,
                          const std::vector<CameraView>& cameras,
                          const SkeletonSchema& schema,
                          const std::map<int, GroundHomography>& rectifiers,
                          const PipelineConfig& cfg);

/// Pooled evaluation of processed frames against optional ground truth.
EvalReport evaluate_frames(
    const std::vector<FrameResult>& results,
    const std::vector<FrameDetections>& detections,
    const std::vector<CameraView>& cameras, const SkeletonSchema& schema,
    const std::vector<FramePoses>* gt_poses,
    const std::map<std::pair<int, int>, int>* gt_correspondence);

/// Exit codes of run_pipeline (also the CLI process exit codes).
enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kParseError = 2,
  kNoPoses = 3,
  kUsageError = 64,
};

/// detections -> foot pairs -> ring matching -> merge -> reconstruction ->
/// poses JSON (+ EvalReport when ground truth is configured). Per-frame
/// soft errors are logged without aborting the run.
int run_pipeline(const PipelineConfig& cfg);

}  // namespace cp3d
