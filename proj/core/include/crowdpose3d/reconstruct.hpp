#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crowdpose3d/detection.hpp"
#include "crowdpose3d/geometry.hpp"
#include "crowdpose3d/matching.hpp"
#include "crowdpose3d/skeleton.hpp"

namespace cp3d {

/// Detection uncertainty model: sigma grows with the person's image size and
/// shrinks with detection confidence,
///   sigma = sigma0 * (diag(bbox) / d_ref) / max(confidence, conf_floor).
struct SigmaModel {
  double sigma0 = 2.0;      // px at the reference scale and full confidence
  double d_ref = 400.0;     // reference bbox diagonal, px
  double conf_floor = 0.1;
};

/// Uncertainty (pixels) of a joint detection. Inputs are clamped; never throws.
double sigma_model(const BBox& bbox, double confidence,
                   const SigmaModel& model = {});

/// One person's reconstructed 3D skeleton plus solver diagnostics.
struct Pose3D {
  int person_id = 0;
  std::vector<std::optional<Point3>> joints;  // M entries, meters
  std::vector<int> per_joint_views;           // M observation counts
  double nll = 0.0;                           // final negative log posterior
  double reproj_rms = 0.0;                    // pixels
  bool converged = true;
  int iterations = 0;
};

struct SolverConfig {
  int max_iters = 100;
  double gradient_tol = 1e-10;
  double step_tol = 1e-10;
  double initial_damping = 1e-3;
  double damping_up = 10.0;    // multiplier after a rejected step
  double damping_down = 3.0;   // divisor after an accepted step
  bool run_mle_stage = true;
  bool allow_prior_completion = false;  // single-view joints via bone prior

  void validate() const;  // throws std::invalid_argument
};

/// Homogeneous DLT triangulation from >= 2 calibrated observations.
/// Throws DegenerateGeometry (near-parallel rays) or PointAtInfinity.
Point3 triangulate_dlt(
    const std::vector<std::pair<CameraView, Point2>>& observations);

/// All observations of one person: camera and detection per covered view.
struct ViewObservation {
  CameraView camera;
  Detection2D detection;
};
using PersonObservations = std::vector<ViewObservation>;

struct PosteriorOptions {
  bool include_prior = true;
  /// Joints whose residuals are assembled; empty = every joint with at
  /// least one present observation.
  std::vector<int> active_joints;
};

/// Negative log posterior at a candidate pose (all M joints stacked as a
/// 3M vector), with the residual vector and its analytic Jacobian.
/// Residuals: two rows (q - proj(P, Q)) / sigma per present (joint, view)
/// observation, then one row (b_ref - |Qa - Qb|) / sigma_l per bone with
/// both endpoints active. value = 0.5 * |r|^2.
/// Throws ZeroLengthBone when a bone is shorter than 1e-9 m.
struct PosteriorEval {
  double value = 0.0;
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;  // residual_count x 3M
};
PosteriorEval neg_log_posterior(const Eigen::VectorXd& candidate,
                                const PersonObservations& observations,
                                const SkeletonSchema& schema,
                                const PosteriorOptions& options = {});

/// Levenberg-Marquardt minimization of 0.5 * |r(x)|^2 with damped normal
/// equations. The callback fills r and J at x and returns false to mark the
/// point invalid (the step is then rejected). `value_trace` records the
/// objective after every accepted step.
struct LmResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  bool converged = true;
};
using ResidualFn = std::function<bool(const Eigen::VectorXd& x,
                                      Eigen::VectorXd& r, Eigen::MatrixXd& J)>;
LmResult lm_minimize(const ResidualFn& fn, Eigen::VectorXd x0,
                     const SolverConfig& cfg,
                     std::vector<double>* value_trace = nullptr);

/// Reprojection-only refinement of a single joint from its observations
/// (the maximum likelihood stage; no bone coupling).
Point3 refine_joint_mle(
    const std::vector<std::pair<CameraView, Point2>>& observations,
    const std::vector<double>& sigmas, const Point3& init,
    const SolverConfig& cfg);

/// Full per-person reconstruction: DLT initialization, optional per-joint
/// MLE stage, then MAP refinement with the bone-length prior.
Pose3D solve_person(const PersonObservations& observations,
                    const SkeletonSchema& schema, const SolverConfig& cfg = {});

/// Per-person soft-failure reports from reconstruct_scene.
struct SceneDiagnostics {
  struct Event {
    int person_id;
    std::string message;
  };
  std::vector<Event> events;
};

/// Reconstructs every person hypothesis independently. Persons without any
/// triangulable joint are dropped with a diagnostic; errors never abort the
/// scene.
std::vector<Pose3D> reconstruct_scene(
    const PersonTrackSet& tracks,
    const std::vector<std::vector<Detection2D>>& detections_per_view,
    const std::vector<CameraView>& cameras, const SkeletonSchema& schema,
    const SolverConfig& cfg = {}, SceneDiagnostics* diagnostics = nullptr);

}  // namespace cp3d
