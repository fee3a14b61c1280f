#include <cmath>
#include <set>

#include "crowdpose3d/reconstruct.hpp"

namespace cp3d {

namespace {

constexpr double kMinBoneLength = 1e-9;

std::vector<int> joints_with_observations(const PersonObservations& obs,
                                          int joint_count) {
  std::vector<int> active;
  for (int j = 0; j < joint_count; ++j) {
    for (const auto& vo : obs) {
      if (j < static_cast<int>(vo.detection.joints.size()) &&
          vo.detection.joints[j].present) {
        active.push_back(j);
        break;
      }
    }
  }
  return active;
}

}  // namespace

PosteriorEval neg_log_posterior(const Eigen::VectorXd& candidate,
                                const PersonObservations& observations,
                                const SkeletonSchema& schema,
                                const PosteriorOptions& options) {
  const int m = schema.joint_count();
  if (candidate.size() != 3 * m)
    throw std::invalid_argument("candidate must stack all M joints");

  const std::vector<int> active = options.active_joints.empty()
                                      ? joints_with_observations(observations, m)
                                      : options.active_joints;
  const std::set<int> active_set(active.begin(), active.end());

  // Count rows: 2 per present observation of an active joint, 1 per bone
  // with both endpoints active.
  int rows = 0;
  for (int j : active)
    for (const auto& vo : observations)
      if (vo.detection.joints[j].present) rows += 2;
  std::vector<int> prior_bones;
  if (options.include_prior) {
    for (int l = 0; l < schema.bone_count(); ++l) {
      const auto [a, b] = schema.bones[l];
      if (active_set.count(a) && active_set.count(b)) {
        prior_bones.push_back(l);
        ++rows;
      }
    }
  }

  PosteriorEval eval;
  eval.residual.setZero(rows);
  eval.jacobian.setZero(rows, 3 * m);

  int row = 0;
  for (int j : active) {
    const auto q3 = candidate.segment<3>(3 * j);
    for (const auto& vo : observations) {
      const JointObs& ob = vo.detection.joints[j];
      if (!ob.present) continue;
      const double sigma = vo.detection.sigma[j];
      if (!(sigma > 0.0))
        throw std::invalid_argument("detection sigma must be > 0");

      const Mat34& P = vo.camera.P;
      const Eigen::Vector3d h = P * q3.homogeneous();
      if (std::abs(h.z()) < kHomogeneousEps)
        throw PointAtInfinity("candidate joint on a principal plane");
      const double inv_w = 1.0 / h.z();

      eval.residual(row) = (ob.position.x() - h.x() * inv_w) / sigma;
      eval.residual(row + 1) = (ob.position.y() - h.y() * inv_w) / sigma;

      // d(u/w)/dQ by the quotient rule; residual rows carry -1/sigma.
      const Eigen::RowVector3d dw = P.row(2).head<3>();
      const Eigen::RowVector3d dx =
          (P.row(0).head<3>() - h.x() * inv_w * dw) * inv_w;
      const Eigen::RowVector3d dy =
          (P.row(1).head<3>() - h.y() * inv_w * dw) * inv_w;
      eval.jacobian.block<1, 3>(row, 3 * j) = -dx / sigma;
      eval.jacobian.block<1, 3>(row + 1, 3 * j) = -dy / sigma;
      row += 2;
    }
  }

  for (int l : prior_bones) {
    const auto [a, b] = schema.bones[l];
    const Eigen::Vector3d e =
        candidate.segment<3>(3 * a) - candidate.segment<3>(3 * b);
    const double len = e.norm();
    if (len < kMinBoneLength)
      throw ZeroLengthBone("bone " + std::to_string(l) +
                           " collapsed; derivative undefined");
    const double inv_sigma = 1.0 / schema.sigma_bone[l];
    eval.residual(row) = (schema.b_ref[l] - len) * inv_sigma;
    const Eigen::RowVector3d d = e.transpose() / len * inv_sigma;
    eval.jacobian.block<1, 3>(row, 3 * a) = -d;
    eval.jacobian.block<1, 3>(row, 3 * b) = d;
    ++row;
  }

  eval.value = 0.5 * eval.residual.squaredNorm();
  return eval;
}

}  // namespace cp3d
