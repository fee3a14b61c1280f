#include "crowdpose3d/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace cp3d {

namespace {

std::optional<Point3> mid_hip(const Pose3D& pose) {
  const auto& l = pose.joints[joints::kLeftHip];
  const auto& r = pose.joints[joints::kRightHip];
  if (l && r) return 0.5 * (*l + *r);
  if (l) return l;
  if (r) return r;
  // Fall back to the centroid of whatever is present.
  Point3 sum = Point3::Zero();
  int n = 0;
  for (const auto& q : pose.joints)
    if (q) {
      sum += *q;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / n;
}

const std::map<std::string, std::vector<int>>& joint_groups() {
  using namespace joints;
  static const std::map<std::string, std::vector<int>> groups = {
      {"Head", {kNose, kLeftEye, kRightEye, kLeftEar, kRightEar}},
      {"Shoulder", {kLeftShoulder, kRightShoulder}},
      {"Elbow", {kLeftElbow, kRightElbow}},
      {"Wrist", {kLeftWrist, kRightWrist}},
      {"Hip", {kLeftHip, kRightHip}},
      {"Knee", {kLeftKnee, kRightKnee}},
      {"Foot",
       {kLeftAnkle, kRightAnkle, kLeftBigToe, kLeftSmallToe, kLeftHeel,
        kRightBigToe, kRightSmallToe, kRightHeel}},
  };
  return groups;
}

// PCP part groups over bone indices of the default tree.
std::map<std::string, std::vector<int>> pcp_parts(const SkeletonSchema& schema) {
  using namespace joints;
  auto bone_index = [&schema](int a, int b) {
    for (int l = 0; l < schema.bone_count(); ++l) {
      const auto [x, y] = schema.bones[l];
      if ((x == a && y == b) || (x == b && y == a)) return l;
    }
    return -1;
  };
  const std::map<std::string, std::vector<std::pair<int, int>>> by_joints = {
      {"Head", {{kNose, kLeftEye}, {kNose, kRightEye}, {kLeftEye, kLeftEar}, {kRightEye, kRightEar}}},
      {"Torso",
       {{kNose, kLeftShoulder}, {kNose, kRightShoulder}, {kLeftShoulder, kLeftHip}, {kRightShoulder, kRightHip}}},
      {"Upper arms", {{kLeftShoulder, kLeftElbow}, {kRightShoulder, kRightElbow}}},
      {"Lower arms", {{kLeftElbow, kLeftWrist}, {kRightElbow, kRightWrist}}},
      {"Upper legs", {{kLeftHip, kLeftKnee}, {kRightHip, kRightKnee}}},
      {"Lower legs", {{kLeftKnee, kLeftAnkle}, {kRightKnee, kRightAnkle}}},
  };
  std::map<std::string, std::vector<int>> parts;
  for (const auto& [name, joint_pairs] : by_joints) {
    for (const auto& [a, b] : joint_pairs) {
      const int l = bone_index(a, b);
      if (l >= 0) parts[name].push_back(l);
    }
  }
  return parts;
}

}  // namespace

std::vector<std::pair<int, int>> match_poses_by_root(
    const std::vector<Pose3D>& pred, const std::vector<Pose3D>& gt,
    double gate_m) {
  struct Candidate {
    double dist;
    int p, g;
  };
  std::vector<Candidate> candidates;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    const auto rp = mid_hip(pred[p]);
    if (!rp) continue;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      const auto rg = mid_hip(gt[g]);
      if (!rg) continue;
      const double d = (*rp - *rg).norm();
      if (d <= gate_m)
        candidates.push_back({d, static_cast<int>(p), static_cast<int>(g)});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    return std::tie(a.dist, a.p, a.g) < std::tie(b.dist, b.p, b.g);
  });

  std::vector<std::pair<int, int>> matches;
  std::set<int> used_p, used_g;
  for (const auto& c : candidates) {
    if (used_p.count(c.p) || used_g.count(c.g)) continue;
    used_p.insert(c.p);
    used_g.insert(c.g);
    matches.emplace_back(c.p, c.g);
  }
  return matches;
}

MpjpeReport mpjpe(const std::vector<Pose3D>& pred, const std::vector<Pose3D>& gt,
                  const SkeletonSchema& schema) {
  const auto matches = match_poses_by_root(pred, gt);
  if (matches.empty()) throw NoMatches("no pose pairs within the root gate");

  std::map<std::string, std::pair<double, int>> group_acc;
  double total = 0.0;
  int count = 0;
  for (const auto& [p, g] : matches) {
    for (int j = 0; j < schema.joint_count(); ++j) {
      const auto& qp = pred[p].joints[j];
      const auto& qg = gt[g].joints[j];
      if (!qp || !qg) continue;
      const double err_mm = (*qp - *qg).norm() * 1000.0;
      total += err_mm;
      ++count;
      for (const auto& [name, members] : joint_groups()) {
        if (std::find(members.begin(), members.end(), j) != members.end()) {
          group_acc[name].first += err_mm;
          group_acc[name].second += 1;
        }
      }
    }
  }
  if (count == 0) throw NoMatches("matched persons share no joints");

  MpjpeReport report;
  report.average_mm = total / count;
  for (const auto& [name, acc] : group_acc)
    report.per_group_mm[name] = acc.first / acc.second;
  return report;
}

PcpReport pcp(const std::vector<Pose3D>& pred, const std::vector<Pose3D>& gt,
              const SkeletonSchema& schema, double threshold_frac) {
  const auto matches = match_poses_by_root(pred, gt);
  if (matches.empty()) throw NoMatches("no pose pairs within the root gate");

  std::map<std::string, std::pair<int, int>> part_acc;  // correct, total
  for (const auto& [p, g] : matches) {
    for (const auto& [name, bone_ids] : pcp_parts(schema)) {
      for (int l : bone_ids) {
        const auto [a, b] = schema.bones[l];
        const auto& pa = pred[p].joints[a];
        const auto& pb = pred[p].joints[b];
        const auto& ga = gt[g].joints[a];
        const auto& gb = gt[g].joints[b];
        if (!ga || !gb) continue;
        auto& acc = part_acc[name];
        acc.second += 1;
        if (!pa || !pb) continue;
        const double limit = threshold_frac * (*ga - *gb).norm();
        if ((*pa - *ga).norm() <= limit && (*pb - *gb).norm() <= limit)
          acc.first += 1;
      }
    }
  }

  PcpReport report;
  int correct = 0, total = 0;
  for (const auto& [name, acc] : part_acc) {
    report.per_part[name] =
        acc.second ? 100.0 * acc.first / acc.second : 0.0;
    correct += acc.first;
    total += acc.second;
  }
  if (total == 0) throw NoMatches("matched persons share no parts");
  report.overall = 100.0 * correct / total;
  return report;
}

std::vector<double> default_oks_kappas(const SkeletonSchema& schema) {
  using namespace joints;
  // MSCOCO per-keypoint falloff, k = 2 * sigma; feet reuse the ankle value.
  std::map<int, double> sigma = {
      {kNose, 0.026},          {kLeftEye, 0.025},      {kRightEye, 0.025},
      {kLeftEar, 0.035},       {kRightEar, 0.035},     {kLeftShoulder, 0.079},
      {kRightShoulder, 0.079}, {kLeftElbow, 0.072},    {kRightElbow, 0.072},
      {kLeftWrist, 0.062},     {kRightWrist, 0.062},   {kLeftHip, 0.107},
      {kRightHip, 0.107},      {kLeftKnee, 0.087},     {kRightKnee, 0.087},
      {kLeftAnkle, 0.089},     {kRightAnkle, 0.089}};
  std::vector<double> kappas(schema.joint_count(), 2.0 * 0.089);
  for (const auto& [j, s] : sigma)
    if (j < schema.joint_count()) kappas[j] = 2.0 * s;
  return kappas;
}

double oks(const PersonKeypoints2D& pred, const PersonKeypoints2D& gt,
           const std::vector<double>& kappas) {
  if (kappas.size() < gt.joints.size())
    throw MissingConstants("kappa table smaller than the joint count");
  const double scale_sq = std::max(gt.bbox_area, 1e-12);
  double sum = 0.0;
  int labeled = 0;
  for (std::size_t j = 0; j < gt.joints.size(); ++j) {
    if (!gt.joints[j]) continue;
    ++labeled;
    if (j >= pred.joints.size() || !pred.joints[j]) continue;
    const double d2 = (*pred.joints[j] - *gt.joints[j]).squaredNorm();
    const double k = kappas[j];
    sum += std::exp(-d2 / (2.0 * scale_sq * k * k));
  }
  return labeled ? sum / labeled : 0.0;
}

namespace {

constexpr double kMediumMin = 32.0 * 32.0;
constexpr double kMediumMax = 96.0 * 96.0;

enum class SizeClass { kAll, kMedium, kLarge };

bool in_class(double area, SizeClass c) {
  switch (c) {
    case SizeClass::kAll: return true;
    case SizeClass::kMedium: return area > kMediumMin && area <= kMediumMax;
    case SizeClass::kLarge: return area > kMediumMax;
  }
  return true;
}

// Precision and recall at one OKS threshold with greedy highest-OKS-first
// matching per frame, restricted to a ground-truth size class.
std::pair<double, double> pr_at(const std::vector<OksFrame>& frames,
                                const std::vector<double>& kappas,
                                double threshold, SizeClass size_class) {
  int tp = 0, n_pred = 0, n_gt = 0;
  for (const auto& frame : frames) {
    std::vector<int> gts;
    for (std::size_t g = 0; g < frame.gt.size(); ++g)
      if (in_class(frame.gt[g].bbox_area, size_class))
        gts.push_back(static_cast<int>(g));
    n_gt += static_cast<int>(gts.size());

    struct Scored {
      double oks;
      int p, g;
    };
    std::vector<Scored> scored;
    for (std::size_t p = 0; p < frame.pred.size(); ++p)
      for (int g : gts) {
        const double s = oks(frame.pred[p], frame.gt[g], kappas);
        scored.push_back({s, static_cast<int>(p), g});
      }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      return std::tie(b.oks, a.p, a.g) < std::tie(a.oks, b.p, b.g);
    });

    std::set<int> used_p, used_g;
    for (const auto& s : scored) {
      if (s.oks < threshold) break;
      if (used_p.count(s.p) || used_g.count(s.g)) continue;
      used_p.insert(s.p);
      used_g.insert(s.g);
      ++tp;
    }
    if (size_class == SizeClass::kAll) {
      n_pred += static_cast<int>(frame.pred.size());
    } else {
      // Predictions that would match an out-of-class gt are not counted
      // against this split; remaining unmatched predictions are counted by
      // their own box size.
      for (std::size_t p = 0; p < frame.pred.size(); ++p) {
        if (used_p.count(static_cast<int>(p))) {
          ++n_pred;
          continue;
        }
        double best = -1.0;
        int best_g = -1;
        for (std::size_t g = 0; g < frame.gt.size(); ++g) {
          const double s = oks(frame.pred[p], frame.gt[g], kappas);
          if (s > best) {
            best = s;
            best_g = static_cast<int>(g);
          }
        }
        const bool near_out_of_class =
            best_g >= 0 && best >= threshold &&
            !in_class(frame.gt[best_g].bbox_area, size_class);
        if (near_out_of_class) continue;
        if (in_class(frame.pred[p].bbox_area, size_class)) ++n_pred;
      }
    }
  }
  const double precision = n_pred ? static_cast<double>(tp) / n_pred : 0.0;
  const double recall = n_gt ? static_cast<double>(tp) / n_gt : 0.0;
  return {precision, recall};
}

}  // namespace

OksReport oks_ap_ar(const std::vector<OksFrame>& frames,
                    const std::vector<double>& kappas) {
  OksReport report;
  const auto sweep = [&](SizeClass c, double* ap, double* ar, double* ap50,
                         double* ap75, double* ar50, double* ar75) {
    double psum = 0.0, rsum = 0.0;
    int n = 0;
    for (int t = 0; t < 10; ++t) {
      const double threshold = 0.5 + 0.05 * t;
      const auto [p, r] = pr_at(frames, kappas, threshold, c);
      psum += p;
      rsum += r;
      ++n;
      if (t == 0) {
        if (ap50) *ap50 = 100.0 * p;
        if (ar50) *ar50 = 100.0 * r;
      }
      if (t == 5) {
        if (ap75) *ap75 = 100.0 * p;
        if (ar75) *ar75 = 100.0 * r;
      }
    }
    *ap = 100.0 * psum / n;
    *ar = 100.0 * rsum / n;
  };

  double ap50 = 0, ap75 = 0, ar50 = 0, ar75 = 0;
  sweep(SizeClass::kAll, &report.ap, &report.ar, &ap50, &ap75, &ar50, &ar75);
  report.ap50 = ap50;
  report.ap75 = ap75;
  report.ar50 = ar50;
  report.ar75 = ar75;
  sweep(SizeClass::kMedium, &report.ap_medium, &report.ar_medium, nullptr,
        nullptr, nullptr, nullptr);
  sweep(SizeClass::kLarge, &report.ap_large, &report.ar_large, nullptr,
        nullptr, nullptr, nullptr);
  return report;
}

double matching_precision(
    const PersonTrackSet& tracks,
    const std::map<std::pair<int, int>, int>& gt_correspondence) {
  long correct = 0, total = 0;
  for (const auto& person : tracks.persons) {
    const std::vector<std::pair<int, int>> dets(person.begin(), person.end());
    for (std::size_t i = 0; i < dets.size(); ++i) {
      for (std::size_t k = i + 1; k < dets.size(); ++k) {
        const auto it_a = gt_correspondence.find(dets[i]);
        const auto it_b = gt_correspondence.find(dets[k]);
        if (it_a == gt_correspondence.end() || it_b == gt_correspondence.end())
          throw NoGroundTruth("correspondence does not cover a linked detection");
        ++total;
        if (it_a->second == it_b->second) ++correct;
      }
    }
  }
  return total ? static_cast<double>(correct) / total : 1.0;
}

ReprojStats reproj_stats(
    const std::vector<Pose3D>& poses, const PersonTrackSet& tracks,
    const std::vector<std::vector<Detection2D>>& detections_per_view,
    const std::vector<CameraView>& cameras, int bins) {
  std::vector<double> distances;
  for (const auto& pose : poses) {
    if (pose.person_id < 0 ||
        pose.person_id >= static_cast<int>(tracks.persons.size()))
      continue;
    for (const auto& [view, det_index] : tracks.persons[pose.person_id]) {
      if (view < 0 || view >= static_cast<int>(cameras.size())) continue;
      const auto& dets = detections_per_view[view];
      if (det_index < 0 || det_index >= static_cast<int>(dets.size())) continue;
      const Detection2D& det = dets[det_index];
      for (std::size_t j = 0; j < pose.joints.size(); ++j) {
        if (!pose.joints[j] || !det.joints[j].present) continue;
        try {
          const Point2 p = project(cameras[view], *pose.joints[j]);
          distances.push_back((det.joints[j].position - p).norm());
        } catch (const PointAtInfinity&) {
        }
      }
    }
  }

  ReprojStats stats;
  stats.histogram.assign(std::max(bins, 1), 0);
  if (distances.empty()) {
    stats.bin_width_px = 1.0;
    return stats;
  }

  double sum = 0.0;
  stats.min = std::numeric_limits<double>::max();
  stats.max = 0.0;
  for (double d : distances) {
    sum += d;
    stats.min = std::min(stats.min, d);
    stats.max = std::max(stats.max, d);
  }
  stats.ave = sum / distances.size();
  double var = 0.0;
  for (double d : distances) var += (d - stats.ave) * (d - stats.ave);
  stats.var = var / distances.size();

  stats.bin_width_px = stats.max > 0.0 ? stats.max / stats.histogram.size() : 1.0;
  for (double d : distances) {
    int bin = static_cast<int>(d / stats.bin_width_px);
    bin = std::clamp(bin, 0, static_cast<int>(stats.histogram.size()) - 1);
    ++stats.histogram[bin];
  }
  return stats;
}

}  // namespace cp3d
