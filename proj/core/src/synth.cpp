#include "crowdpose3d/synth.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "crowdpose3d/skeleton.hpp"

namespace cp3d {

void SceneSpec::validate() const {
  if (n_persons < 1) throw std::invalid_argument("scene: n_persons < 1");
  if (n_views < 2) throw std::invalid_argument("scene: n_views < 2");
  if (noise_px < 0.0) throw std::invalid_argument("scene: negative noise");
  if (occlusion_rate < 0.0 || occlusion_rate >= 1.0 || swap_rate < 0.0 ||
      swap_rate >= 1.0)
    throw std::invalid_argument("scene: rates must lie in [0, 1)");
  if (!(area.x() > 0.0) || !(area.y() > 0.0))
    throw std::invalid_argument("scene: area must be positive");
}

namespace {

using joints::kCount;

// Template bone directions in the body frame (x right, y forward, z up),
// keyed by the construction traversal from the left heel through the tree.
// The right half mirrors the left in x, which keeps the net z offset along
// the left-heel -> right-heel path zero: both heels land exactly on the
// ground no matter which azimuthal jitter is applied.
struct DirectedBone {
  int from, to;
  Eigen::Vector3d dir;  // unit on construction
};

std::vector<DirectedBone> template_directions() {
  using namespace joints;
  auto mirror = [](const Eigen::Vector3d& d) {
    return Eigen::Vector3d(-d.x(), d.y(), d.z());
  };

  const Eigen::Vector3d heel_to_ankle(0.0, 0.45, 0.89);
  const Eigen::Vector3d ankle_to_big_toe(0.10, 0.92, -0.38);    // left
  const Eigen::Vector3d ankle_to_small_toe(-0.35, 0.85, -0.40);  // left
  const Eigen::Vector3d ankle_to_knee(0.02, 0.06, 0.998);        // left
  const Eigen::Vector3d knee_to_hip(0.06, -0.06, 0.996);         // left
  const Eigen::Vector3d hip_to_shoulder(-0.06, -0.02, 0.998);    // left
  const Eigen::Vector3d shoulder_to_elbow(-0.25, 0.05, -0.97);   // left
  const Eigen::Vector3d elbow_to_wrist(-0.05, 0.12, -0.99);      // left
  const Eigen::Vector3d shoulder_to_nose(0.77, 0.12, 0.63);      // left
  const Eigen::Vector3d nose_to_eye(-0.55, 0.55, 0.63);          // left
  const Eigen::Vector3d eye_to_ear(-0.76, -0.63, 0.16);          // left

  std::vector<DirectedBone> t;
  // Left leg and foot, built upward from the pinned left heel.
  t.push_back({kLeftHeel, kLeftAnkle, heel_to_ankle});
  t.push_back({kLeftAnkle, kLeftBigToe, ankle_to_big_toe});
  t.push_back({kLeftAnkle, kLeftSmallToe, ankle_to_small_toe});
  t.push_back({kLeftAnkle, kLeftKnee, ankle_to_knee});
  t.push_back({kLeftKnee, kLeftHip, knee_to_hip});
  // Torso and head.
  t.push_back({kLeftHip, kLeftShoulder, hip_to_shoulder});
  t.push_back({kLeftShoulder, kLeftElbow, shoulder_to_elbow});
  t.push_back({kLeftElbow, kLeftWrist, elbow_to_wrist});
  t.push_back({kLeftShoulder, kNose, shoulder_to_nose});
  t.push_back({kNose, kLeftEye, nose_to_eye});
  t.push_back({kLeftEye, kLeftEar, eye_to_ear});
  t.push_back({kNose, kRightEye, mirror(nose_to_eye)});
  t.push_back({kRightEye, kRightEar, mirror(eye_to_ear)});
  // Down the right half; directions reverse and mirror the left ones.
  t.push_back({kNose, kRightShoulder, -mirror(shoulder_to_nose)});
  t.push_back({kRightShoulder, kRightElbow, mirror(shoulder_to_elbow)});
  t.push_back({kRightElbow, kRightWrist, mirror(elbow_to_wrist)});
  t.push_back({kRightShoulder, kRightHip, -mirror(hip_to_shoulder)});
  t.push_back({kRightHip, kRightKnee, -mirror(knee_to_hip)});
  t.push_back({kRightKnee, kRightAnkle, -mirror(ankle_to_knee)});
  t.push_back({kRightAnkle, kRightHeel, -mirror(heel_to_ankle)});
  t.push_back({kRightAnkle, kRightBigToe, mirror(ankle_to_big_toe)});
  t.push_back({kRightAnkle, kRightSmallToe, mirror(ankle_to_small_toe)});

  for (auto& b : t) b.dir.normalize();
  return t;
}

// Bones whose jitter must stay azimuthal (about z) because they lie on the
// heel-to-heel path; anything else may tilt freely.
bool on_heel_path(int from, int to) {
  using namespace joints;
  auto leaf = [](int j) {
    return j == kLeftEye || j == kRightEye || j == kLeftEar || j == kRightEar ||
           j == kLeftBigToe || j == kRightBigToe || j == kLeftSmallToe ||
           j == kRightSmallToe || j == kLeftElbow || j == kRightElbow ||
           j == kLeftWrist || j == kRightWrist;
  };
  return !leaf(from) && !leaf(to);
}

bool left_leg_bone(int from, int to) {
  using namespace joints;
  auto in = [](int j) {
    return j == kLeftHeel || j == kLeftAnkle || j == kLeftKnee ||
           j == kLeftBigToe || j == kLeftSmallToe || j == kLeftHip;
  };
  return in(from) && in(to);
}

bool right_leg_bone(int from, int to) {
  using namespace joints;
  auto in = [](int j) {
    return j == kRightHeel || j == kRightAnkle || j == kRightKnee ||
           j == kRightBigToe || j == kRightSmallToe || j == kRightHip;
  };
  return in(from) && in(to);
}

double bone_length(const SkeletonSchema& schema, int a, int b) {
  for (int l = 0; l < schema.bone_count(); ++l) {
    const auto [x, y] = schema.bones[l];
    if ((x == a && y == b) || (x == b && y == a)) return schema.b_ref[l];
  }
  throw std::logic_error("template references a bone missing from the schema");
}

Eigen::Matrix3d rot_z(double angle) {
  return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

// One articulated template skeleton. Heading and jitters rotate the
// construction directions; every bone keeps its exact reference length.
std::vector<Point3> build_person(const SkeletonSchema& schema,
                                 const std::vector<DirectedBone>& tmpl,
                                 double heading, double artic_rad,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double leg_swing = 25.0 * std::numbers::pi / 180.0;
  const double theta_left = uni(rng) * leg_swing;
  const double theta_right = uni(rng) * leg_swing;

  std::vector<Point3> pos(kCount, Point3::Zero());
  pos[joints::kLeftHeel].setZero();

  for (const auto& bone : tmpl) {
    const double az = uni(rng) * artic_rad;
    Eigen::Vector3d d = rot_z(az) * bone.dir;
    if (!on_heel_path(bone.from, bone.to)) {
      // Free tilt for leaf bones: rotate about a random horizontal axis.
      const double tilt = uni(rng) * artic_rad;
      const double axis_angle = uni(rng) * std::numbers::pi;
      const Eigen::Vector3d axis(std::cos(axis_angle), std::sin(axis_angle), 0.0);
      d = Eigen::AngleAxisd(tilt, axis) * d;
    }
    if (left_leg_bone(bone.from, bone.to)) d = rot_z(theta_left) * d;
    if (right_leg_bone(bone.from, bone.to)) d = rot_z(theta_right) * d;
    d = rot_z(heading) * d;
    pos[bone.to] = pos[bone.from] + d * bone_length(schema, bone.from, bone.to);
  }
  return pos;
}

CameraView make_camera(int id, const Point3& position, const Point3& target,
                       double focal, int width, int height) {
  const Eigen::Vector3d forward = (target - position).normalized();
  Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ());
  if (right.norm() < 1e-9) right = Eigen::Vector3d::UnitX();
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);

  Eigen::Matrix3d R;
  R.row(0) = right.transpose();
  R.row(1) = down.transpose();
  R.row(2) = forward.transpose();

  Eigen::Matrix3d K = Eigen::Matrix3d::Identity();
  K(0, 0) = K(1, 1) = focal;
  K(0, 2) = width / 2.0;
  K(1, 2) = height / 2.0;

  CameraView cam;
  cam.id = id;
  cam.width = width;
  cam.height = height;
  cam.P.leftCols<3>() = K * R;
  cam.P.col(3) = -K * R * position;
  return cam;
}

bool inside_expanded_frame(const Point2& p, int width, int height) {
  const double mx = 0.1 * width;
  const double my = 0.1 * height;
  return p.x() >= -mx && p.x() <= width + mx && p.y() >= -my &&
         p.y() <= height + my;
}

}  // namespace

GroundTruth generate(const SceneSpec& spec) {
  spec.validate();
  const SkeletonSchema& schema = default_skeleton();
  const int m = schema.joint_count();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uni01(0.0, 1.0);

  GroundTruth gt;

  // Place persons with rejection sampling on the anchor spacing.
  const auto tmpl = template_directions();
  std::vector<Eigen::Vector2d> anchors;
  for (int p = 0; p < spec.n_persons; ++p) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const Eigen::Vector2d candidate(
          (uni01(rng) - 0.5) * spec.area.x(),
          (uni01(rng) - 0.5) * spec.area.y());
      const bool clear = std::all_of(
          anchors.begin(), anchors.end(), [&](const Eigen::Vector2d& a) {
            return (a - candidate).norm() >= spec.min_spacing_m;
          });
      if (!clear) continue;
      anchors.push_back(candidate);
      placed = true;
    }
    if (!placed)
      throw InfeasibleSpec("could not place person " + std::to_string(p) +
                           " at the requested density");

    const double heading = uni01(rng) * 2.0 * std::numbers::pi;
    std::vector<Point3> joints3d =
        build_person(schema, tmpl, heading,
                     spec.articulation_deg * std::numbers::pi / 180.0, rng);

    // Shift so the mid-heel point sits at the sampled anchor (z untouched:
    // both heels are already exactly on the ground).
    const Eigen::Vector2d mid =
        0.5 * (joints3d[schema.left_heel].head<2>() +
               joints3d[schema.right_heel].head<2>());
    const Eigen::Vector2d shift = anchors.back() - mid;
    for (auto& q : joints3d) q.head<2>() += shift;

    Pose3D pose;
    pose.person_id = p;
    pose.per_joint_views.assign(m, spec.n_views);
    for (const auto& q : joints3d) pose.joints.emplace_back(q);
    gt.poses3d.push_back(std::move(pose));
  }

  // Camera ring around the area, looking at its center.
  const double auto_radius = 1.3 * std::hypot(spec.area.x(), spec.area.y());
  const double radius =
      spec.camera_radius_m > 0.0 ? spec.camera_radius_m : std::max(auto_radius, 7.0);
  const Point3 target(0.0, 0.0, 1.0);
  for (int k = 0; k < spec.n_views; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / spec.n_views;
    const Point3 position(radius * std::cos(angle), radius * std::sin(angle),
                          spec.camera_height_m);
    gt.cameras.push_back(make_camera(k, position, target, spec.focal_px,
                                     spec.image_width, spec.image_height));
  }
  for (int a = 0; a < spec.n_views; ++a)
    for (int b = 0; b < spec.n_views; ++b)
      if (a != b)
        gt.homographies.push_back(
            ground_homography_from_cameras(gt.cameras[a], gt.cameras[b]));

  // Detections: exact projections, then noise, occlusion, swaps.
  std::normal_distribution<double> gauss(0.0, 1.0);
  gt.detections.resize(spec.n_views);
  for (int v = 0; v < spec.n_views; ++v) {
    const CameraView& cam = gt.cameras[v];
    std::vector<Detection2D> dets;
    std::vector<int> person_of;

    for (int p = 0; p < spec.n_persons; ++p) {
      Detection2D det;
      det.view = v;
      det.joints.assign(m, JointObs{});
      det.sigma.assign(m, 1.0);
      int present = 0;
      for (int j = 0; j < m; ++j) {
        Point2 px;
        try {
          px = project(cam, *gt.poses3d[p].joints[j]);
        } catch (const PointAtInfinity&) {
          continue;
        }
        if (!inside_expanded_frame(px, cam.width, cam.height)) continue;
        if (spec.noise_px > 0.0) {
          px.x() += gauss(rng) * spec.noise_px;
          px.y() += gauss(rng) * spec.noise_px;
          if (!inside_expanded_frame(px, cam.width, cam.height)) continue;
        }
        det.joints[j].position = px;
        det.joints[j].confidence = 0.6 + 0.4 * uni01(rng);
        det.joints[j].present = true;
        ++present;
      }
      if (present == 0) continue;

      if (spec.occlusion_rate > 0.0) {
        for (int j = 0; j < m; ++j) {
          if (det.joints[j].present && uni01(rng) < spec.occlusion_rate) {
            det.joints[j] = JointObs{};
            --present;
          }
        }
        if (present <= 0) continue;
      }
      dets.push_back(std::move(det));
      person_of.push_back(p);
    }

    // Swaps: a joint detection replaced by the same joint of the nearest
    // other person, measured at the mid-hip in this view.
    if (spec.swap_rate > 0.0 && dets.size() > 1) {
      auto root_px = [&](const Detection2D& d) {
        const JointObs& lh = d.joints[joints::kLeftHip];
        const JointObs& rh = d.joints[joints::kRightHip];
        if (lh.present && rh.present) return Point2(0.5 * (lh.position + rh.position));
        if (lh.present) return lh.position;
        if (rh.present) return rh.position;
        return d.joints[0].position;
      };
      const std::vector<Detection2D> original = dets;
      for (std::size_t i = 0; i < dets.size(); ++i) {
        std::size_t nearest = i;
        double best = std::numeric_limits<double>::max();
        for (std::size_t o = 0; o < original.size(); ++o) {
          if (o == i) continue;
          const double dist = (root_px(original[i]) - root_px(original[o])).norm();
          if (dist < best) {
            best = dist;
            nearest = o;
          }
        }
        if (nearest == i) continue;
        for (int j = 0; j < m; ++j) {
          if (!dets[i].joints[j].present) continue;
          if (uni01(rng) >= spec.swap_rate) continue;
          if (original[nearest].joints[j].present)
            dets[i].joints[j].position = original[nearest].joints[j].position;
        }
      }
    }

    // Bounding boxes and uncertainties from the final joint positions.
    for (auto& det : dets) {
      Point2 lo(1e30, 1e30), hi(-1e30, -1e30);
      for (const auto& jo : det.joints) {
        if (!jo.present) continue;
        lo = lo.cwiseMin(jo.position);
        hi = hi.cwiseMax(jo.position);
      }
      const Point2 extent = (hi - lo).cwiseMax(1.0);
      det.bbox = {lo.x() - 0.05 * extent.x(), lo.y() - 0.05 * extent.y(),
                  1.1 * extent.x(), 1.1 * extent.y()};
      for (int j = 0; j < m; ++j)
        det.sigma[j] = sigma_model(det.bbox, det.joints[j].confidence);
    }

    // Shuffle detection order so view index never encodes identity.
    std::vector<int> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t k =
          static_cast<std::size_t>(uni01(rng) * static_cast<double>(i));
      std::swap(order[i - 1], order[std::min(k, i - 1)]);
    }
    for (std::size_t slot = 0; slot < order.size(); ++slot) {
      Detection2D det = dets[order[slot]];
      det.person_index = static_cast<int>(slot);
      gt.correspondence[{v, static_cast<int>(slot)}] = person_of[order[slot]];
      gt.detections[v].push_back(std::move(det));
    }
  }

  return gt;
}

}  // namespace cp3d
