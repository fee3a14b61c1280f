#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "crowdpose3d/log.hpp"
#include "crowdpose3d/reconstruct.hpp"

namespace cp3d {

void SolverConfig::validate() const {
  if (max_iters <= 0 || !(gradient_tol > 0.0) || !(step_tol > 0.0) ||
      !(initial_damping > 0.0) || !(damping_up > 1.0) || !(damping_down > 1.0))
    throw std::invalid_argument("solver config fields must be positive");
}

LmResult lm_minimize(const ResidualFn& fn, Eigen::VectorXd x0,
                     const SolverConfig& cfg, std::vector<double>* value_trace) {
  cfg.validate();
  constexpr double kMaxDamping = 1e15;
  constexpr double kMinDamping = 1e-15;

  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  if (!fn(x0, r, J)) {
    // Invalid start; nudge once along the first axis.
    Eigen::VectorXd nudged = x0;
    if (nudged.size() > 0) nudged(0) += 1e-6;
    if (!fn(nudged, r, J))
      return {x0, std::numeric_limits<double>::infinity(), 0.0, 0, false};
    x0 = nudged;
  }

  LmResult res;
  res.x = x0;
  res.value = 0.5 * r.squaredNorm();
  if (value_trace) value_trace->push_back(res.value);

  double damping = cfg.initial_damping;
  Eigen::VectorXd g = J.transpose() * r;
  res.grad_inf_norm = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
  if (res.grad_inf_norm < cfg.gradient_tol) return res;

  Eigen::MatrixXd JtJ = J.transpose() * J;
  Eigen::VectorXd r_new;
  Eigen::MatrixXd J_new;

  while (res.iterations < cfg.max_iters) {
    ++res.iterations;

    // Damped normal equations (J'J + damping * diag(J'J)) step = -g.
    Eigen::MatrixXd A = JtJ;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      A(i, i) += damping * std::max(JtJ(i, i), 1e-12);
    const Eigen::VectorXd step = A.ldlt().solve(-g);

    bool accepted = false;
    if (step.allFinite()) {
      const Eigen::VectorXd x_new = res.x + step;
      if (fn(x_new, r_new, J_new)) {
        const double value_new = 0.5 * r_new.squaredNorm();
        if (value_new < res.value) {
          res.x = x_new;
          res.value = value_new;
          if (value_trace) value_trace->push_back(res.value);
          r.swap(r_new);
          J.swap(J_new);
          g = J.transpose() * r;
          JtJ = J.transpose() * J;
          res.grad_inf_norm = g.cwiseAbs().maxCoeff();
          damping = std::max(damping / cfg.damping_down, kMinDamping);
          accepted = true;
          if (res.grad_inf_norm < cfg.gradient_tol) return res;
          if (step.norm() < cfg.step_tol) return res;
        }
      }
    }
    if (!accepted) {
      damping *= cfg.damping_up;
      if (damping > kMaxDamping) break;  // no further progress possible
    }
  }

  res.converged = res.grad_inf_norm <= 1e-4;
  return res;
}

namespace {

// Observations of one joint across views, with uncertainties.
struct JointObservations {
  std::vector<std::pair<CameraView, Point2>> views;
  std::vector<double> sigmas;
};

ResidualFn reprojection_residual_fn(const JointObservations& jo) {
  return [&jo](const Eigen::VectorXd& x, Eigen::VectorXd& r,
               Eigen::MatrixXd& J) {
    const std::size_t n = jo.views.size();
    r.resize(2 * n);
    J.resize(2 * n, 3);
    for (std::size_t i = 0; i < n; ++i) {
      const Mat34& P = jo.views[i].first.P;
      const Point2& q = jo.views[i].second;
      const double sigma = jo.sigmas[i];
      const Eigen::Vector3d h =
          P * Eigen::Vector3d(x(0), x(1), x(2)).homogeneous();
      if (std::abs(h.z()) < kHomogeneousEps) return false;
      const double inv_w = 1.0 / h.z();
      r(2 * i) = (q.x() - h.x() * inv_w) / sigma;
      r(2 * i + 1) = (q.y() - h.y() * inv_w) / sigma;
      const Eigen::RowVector3d dw = P.row(2).head<3>();
      J.row(2 * i) =
          -((P.row(0).head<3>() - h.x() * inv_w * dw) * inv_w) / sigma;
      J.row(2 * i + 1) =
          -((P.row(1).head<3>() - h.y() * inv_w * dw) * inv_w) / sigma;
    }
    return true;
  };
}

}  // namespace

Point3 refine_joint_mle(
    const std::vector<std::pair<CameraView, Point2>>& observations,
    const std::vector<double>& sigmas, const Point3& init,
    const SolverConfig& cfg) {
  if (observations.size() != sigmas.size())
    throw std::invalid_argument("refine_joint_mle: sigma count mismatch");
  JointObservations jo{observations, sigmas};
  const LmResult res = lm_minimize(reprojection_residual_fn(jo), init, cfg);
  return res.x;
}

Pose3D solve_person(const PersonObservations& observations,
                    const SkeletonSchema& schema, const SolverConfig& cfg) {
  cfg.validate();
  const int m = schema.joint_count();

  Pose3D pose;
  pose.joints.assign(m, std::nullopt);
  pose.per_joint_views.assign(m, 0);

  // Gather per-joint observations.
  std::vector<JointObservations> per_joint(m);
  for (const auto& vo : observations) {
    if (static_cast<int>(vo.detection.joints.size()) != m ||
        static_cast<int>(vo.detection.sigma.size()) != m)
      throw std::invalid_argument("detection joint count disagrees with schema");
    for (int j = 0; j < m; ++j) {
      const JointObs& ob = vo.detection.joints[j];
      if (!ob.present) continue;
      per_joint[j].views.emplace_back(vo.camera, ob.position);
      per_joint[j].sigmas.push_back(vo.detection.sigma[j]);
      ++pose.per_joint_views[j];
    }
  }

  // Active set: joints observed in >= 2 views; optionally single-view joints
  // that a bone chains to the active set.
  std::set<int> active;
  for (int j = 0; j < m; ++j)
    if (pose.per_joint_views[j] >= 2) active.insert(j);
  if (cfg.allow_prior_completion) {
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& [a, b] : schema.bones) {
        if (active.count(a) && !active.count(b) && pose.per_joint_views[b] == 1)
          grew = active.insert(b).second || grew;
        if (active.count(b) && !active.count(a) && pose.per_joint_views[a] == 1)
          grew = active.insert(a).second || grew;
      }
    }
  }
  if (active.empty()) return pose;  // nothing triangulable

  // Stage 1: vanilla DLT initialization per joint.
  Eigen::VectorXd candidate = Eigen::VectorXd::Zero(3 * m);
  std::set<int> initialized;
  for (int j : active) {
    if (pose.per_joint_views[j] < 2) continue;
    try {
      candidate.segment<3>(3 * j) = triangulate_dlt(per_joint[j].views);
      initialized.insert(j);
    } catch (const Error& e) {
      CP3D_LOG_DEBUG("joint %d: DLT failed (%s)", j, e.what());
    }
  }
  // Joints that DLT could not place start next to an initialized neighbor.
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t l = 0; l < schema.bones.size(); ++l) {
      const auto [a, b] = schema.bones[l];
      if (!active.count(a) || !active.count(b)) continue;
      if (initialized.count(a) && !initialized.count(b)) {
        candidate.segment<3>(3 * b) =
            candidate.segment<3>(3 * a) +
            Eigen::Vector3d(schema.b_ref[l], 0, 0);
        initialized.insert(b);
        grew = true;
      } else if (initialized.count(b) && !initialized.count(a)) {
        candidate.segment<3>(3 * a) =
            candidate.segment<3>(3 * b) +
            Eigen::Vector3d(schema.b_ref[l], 0, 0);
        initialized.insert(a);
        grew = true;
      }
    }
  }
  for (auto it = active.begin(); it != active.end();) {
    if (!initialized.count(*it))
      it = active.erase(it);
    else
      ++it;
  }
  if (active.empty()) return pose;

  int iterations = 0;

  // Stage 2: independent per-joint MLE warm start.
  if (cfg.run_mle_stage) {
    for (int j : active) {
      if (pose.per_joint_views[j] < 2) continue;
      const LmResult res = lm_minimize(reprojection_residual_fn(per_joint[j]),
                                       candidate.segment<3>(3 * j), cfg);
      candidate.segment<3>(3 * j) = res.x;
      iterations += res.iterations;
    }
  }

  // Stage 3: joint MAP over the active coordinates.
  PosteriorOptions opts;
  opts.include_prior = true;
  opts.active_joints.assign(active.begin(), active.end());

  const std::vector<int>& act = opts.active_joints;
  auto scatter = [&](const Eigen::VectorXd& packed) {
    Eigen::VectorXd full = candidate;
    for (std::size_t i = 0; i < act.size(); ++i)
      full.segment<3>(3 * act[i]) = packed.segment<3>(3 * i);
    return full;
  };

  ResidualFn map_fn = [&](const Eigen::VectorXd& packed, Eigen::VectorXd& r,
                          Eigen::MatrixXd& J) {
    try {
      PosteriorEval eval =
          neg_log_posterior(scatter(packed), observations, schema, opts);
      r.swap(eval.residual);
      J.resize(r.size(), 3 * act.size());
      for (std::size_t i = 0; i < act.size(); ++i)
        J.middleCols(3 * i, 3) = eval.jacobian.middleCols(3 * act[i], 3);
      return true;
    } catch (const ZeroLengthBone&) {
      return false;
    } catch (const PointAtInfinity&) {
      return false;
    }
  };

  Eigen::VectorXd packed(3 * act.size());
  for (std::size_t i = 0; i < act.size(); ++i)
    packed.segment<3>(3 * i) = candidate.segment<3>(3 * act[i]);

  const LmResult res = lm_minimize(map_fn, packed, cfg);
  candidate = scatter(res.x);
  iterations += res.iterations;

  pose.nll = res.value;
  pose.converged = res.converged;
  pose.iterations = iterations;
  for (int j : act) pose.joints[j] = candidate.segment<3>(3 * j);

  // Unweighted pixel reprojection RMS over all used observations.
  double sq_sum = 0.0;
  int count = 0;
  for (int j : act) {
    for (std::size_t i = 0; i < per_joint[j].views.size(); ++i) {
      try {
        const Point2 p =
            project(per_joint[j].views[i].first, *pose.joints[j]);
        sq_sum += (per_joint[j].views[i].second - p).squaredNorm();
        ++count;
      } catch (const PointAtInfinity&) {
      }
    }
  }
  pose.reproj_rms = count ? std::sqrt(sq_sum / count) : 0.0;
  return pose;
}

std::vector<Pose3D> reconstruct_scene(
    const PersonTrackSet& tracks,
    const std::vector<std::vector<Detection2D>>& detections_per_view,
    const std::vector<CameraView>& cameras, const SkeletonSchema& schema,
    const SolverConfig& cfg, SceneDiagnostics* diagnostics) {
  std::vector<Pose3D> poses;
  auto report = [&](int person, const std::string& msg) {
    CP3D_LOG_INFO("person %d: %s", person, msg.c_str());
    if (diagnostics) diagnostics->events.push_back({person, msg});
  };

  for (std::size_t person = 0; person < tracks.persons.size(); ++person) {
    PersonObservations obs;
    for (const auto& [view, det_index] : tracks.persons[person]) {
      if (view < 0 || view >= static_cast<int>(cameras.size()) ||
          det_index < 0 ||
          det_index >= static_cast<int>(detections_per_view[view].size())) {
        report(static_cast<int>(person), "track references a missing detection");
        continue;
      }
      obs.push_back({cameras[view], detections_per_view[view][det_index]});
    }
    if (obs.size() < 2) {
      report(static_cast<int>(person),
             "dropped: fewer than two views, nothing to triangulate");
      continue;
    }
    try {
      Pose3D pose = solve_person(obs, schema, cfg);
      if (std::none_of(pose.joints.begin(), pose.joints.end(),
                       [](const auto& q) { return q.has_value(); })) {
        report(static_cast<int>(person), "dropped: no triangulable joint");
        continue;
      }
      pose.person_id = static_cast<int>(person);
      if (!pose.converged)
        report(static_cast<int>(person), "solver hit max iterations");
      poses.push_back(std::move(pose));
    } catch (const Error& e) {
      report(static_cast<int>(person), std::string("dropped: ") + e.what());
    }
  }
  return poses;
}

}  // namespace cp3d
