#include "crowdpose3d/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "crowdpose3d/log.hpp"

namespace cp3d {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void PipelineConfig::validate() const {
  if (gate < 0.0 || min_heel_confidence < 0.0 || threads < 1)
    throw std::invalid_argument("pipeline config: bad numeric field");
  if (weights.k1 < 0.0 || weights.k2 < 0.0 || weights.k3 < 0.0)
    throw std::invalid_argument("pipeline config: negative matching weight");
  solver.validate();
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }

  PipelineConfig cfg;
  try {
    cfg.calibration_path = j.value("calibration", cfg.calibration_path);
    cfg.detections_path = j.value("detections", cfg.detections_path);
    cfg.schema_path = j.value("schema", cfg.schema_path);
    cfg.correspondences_path =
        j.value("correspondences", cfg.correspondences_path);
    cfg.homographies_path = j.value("homographies", cfg.homographies_path);
    cfg.gt_poses_path = j.value("gt_poses", cfg.gt_poses_path);
    cfg.gt_correspondence_path =
        j.value("gt_correspondence", cfg.gt_correspondence_path);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.dump_matching_dir = j.value("dump_matching", cfg.dump_matching_dir);
    cfg.threads = j.value("threads", cfg.threads);

    if (j.contains("matching")) {
      const auto& m = j["matching"];
      cfg.weights.k1 = m.value("k1", cfg.weights.k1);
      cfg.weights.k2 = m.value("k2", cfg.weights.k2);
      cfg.weights.k3 = m.value("k3", cfg.weights.k3);
      cfg.gate = m.value("gate", cfg.gate);
      cfg.min_heel_confidence =
          m.value("min_heel_confidence", cfg.min_heel_confidence);
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      cfg.solver.max_iters = s.value("max_iters", cfg.solver.max_iters);
      cfg.solver.gradient_tol = s.value("gradient_tol", cfg.solver.gradient_tol);
      cfg.solver.step_tol = s.value("step_tol", cfg.solver.step_tol);
      cfg.solver.initial_damping =
          s.value("initial_damping", cfg.solver.initial_damping);
      cfg.solver.damping_up = s.value("damping_up", cfg.solver.damping_up);
      cfg.solver.damping_down = s.value("damping_down", cfg.solver.damping_down);
      cfg.solver.run_mle_stage = s.value("run_mle_stage", cfg.solver.run_mle_stage);
      cfg.solver.allow_prior_completion =
          s.value("allow_prior_completion", cfg.solver.allow_prior_completion);
    }
    if (j.contains("sigma")) {
      const auto& s = j["sigma"];
      cfg.sigma.sigma0 = s.value("sigma0", cfg.sigma.sigma0);
      cfg.sigma.d_ref = s.value("d_ref", cfg.sigma.d_ref);
      cfg.sigma.conf_floor = s.value("conf_floor", cfg.sigma.conf_floor);
    }
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      cfg.scene.n_persons = s.value("persons", cfg.scene.n_persons);
      cfg.scene.n_views = s.value("views", cfg.scene.n_views);
      cfg.scene.noise_px = s.value("noise", cfg.scene.noise_px);
      cfg.scene.occlusion_rate = s.value("occlusion", cfg.scene.occlusion_rate);
      cfg.scene.swap_rate = s.value("swap", cfg.scene.swap_rate);
      cfg.scene.seed = s.value("seed", cfg.scene.seed);
      cfg.scene.min_spacing_m = s.value("min_spacing", cfg.scene.min_spacing_m);
      if (s.contains("area"))
        cfg.scene.area = Eigen::Vector2d(s["area"].at(0).get<double>(),
                                         s["area"].at(1).get<double>());
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return cfg;
}

std::map<int, GroundHomography> world_rectifiers(
    const std::vector<CameraView>& cameras) {
  std::map<int, GroundHomography> rect;
  for (const auto& cam : cameras) rect[cam.id] = ground_plane_chart(cam);
  return rect;
}

std::map<int, GroundHomography> compose_rectifiers(
    const std::vector<GroundHomography>& pairwise) {
  if (pairwise.empty())
    throw DegenerateConfiguration("no homographies to compose");

  int ref = pairwise.front().from_view;
  for (const auto& h : pairwise) ref = std::min({ref, h.from_view, h.to_view});

  std::map<int, GroundHomography> rect;
  rect[ref] = GroundHomography::identity(ref, ref);

  // Breadth-first composition over the view graph.
  std::vector<int> queue{ref};
  while (!queue.empty()) {
    const int u = queue.back();
    queue.pop_back();
    for (const auto& h : pairwise) {
      for (const bool forward : {true, false}) {
        const int from = forward ? h.from_view : h.to_view;
        const int to = forward ? h.to_view : h.from_view;
        if (to != u || rect.count(from)) continue;
        const Eigen::Matrix3d step = forward ? h.H : h.inverse().H;
        GroundHomography r;
        r.from_view = from;
        r.to_view = ref;
        r.H = normalize_homography(rect[u].H * step);
        rect[from] = r;
        queue.push_back(from);
      }
    }
  }
  return rect;
}

PersonTrackSet match_views(const FrameDetections& detections,
                           const SkeletonSchema& schema,
                           const std::map<int, GroundHomography>& rectifiers,
                           const MatchOptions& options) {
  const int n_views = static_cast<int>(detections.size());
  std::vector<std::vector<FootPair>> feet(n_views);
  std::vector<std::pair<int, int>> leftovers;  // (view, detection)
  std::vector<int> ring_views;

  for (int v = 0; v < n_views; ++v) {
    const auto rect = rectifiers.find(v);
    const bool has_rect = rect != rectifiers.end();
    if (has_rect && !detections[v].empty()) ring_views.push_back(v);
    for (std::size_t d = 0; d < detections[v].size(); ++d) {
      if (!has_rect) {
        leftovers.emplace_back(v, static_cast<int>(d));
        continue;
      }
      try {
        feet[v].push_back(extract_foot_pairs(detections[v][d], schema,
                                             rect->second,
                                             options.min_heel_confidence));
      } catch (const MissingFeet&) {
        leftovers.emplace_back(v, static_cast<int>(d));
      }
    }
  }

  std::vector<Assignment> assignments;
  const int n = static_cast<int>(ring_views.size());
  const int pair_count = n == 2 ? 1 : n;
  for (int i = 0; n >= 2 && i < pair_count; ++i) {
    const int va = ring_views[i];
    const int vb = ring_views[(i + 1) % n];
    const GroundHomography transfer = GroundHomography::identity(vb, va);
    Assignment asg = match_pair(feet[va], feet[vb], transfer, options.weights,
                                options.gate, options.algorithm);
    if (!options.dump_dir.empty()) {
      fs::create_directories(options.dump_dir);
      const BipartiteGraph g =
          build_bipartite_graph(feet[va], feet[vb], transfer, options.weights);
      json pairs = json::array();
      for (const auto& p : asg.pairs)
        pairs.push_back({{"a", p.l}, {"b", p.m}, {"cost", p.cost}});
      json cost = json::array();
      for (Eigen::Index r = 0; r < g.cost.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < g.cost.cols(); ++c)
          row.push_back(g.cost(r, c));
        cost.push_back(row);
      }
      const std::string name = "frame_" + std::to_string(options.frame_index) +
                               "_pair_" + std::to_string(va) + "_" +
                               std::to_string(vb) + ".json";
      std::ofstream out(fs::path(options.dump_dir) / name);
      out << json{{"view_a", va}, {"view_b", vb}, {"cost", cost},
                  {"pairs", pairs}}
                 .dump(2)
          << "\n";
    }
    assignments.push_back(std::move(asg));
  }

  PersonTrackSet tracks;
  if (!assignments.empty()) {
    tracks = merge_multiview(assignments);
  } else {
    for (int v = 0; v < n_views && n == 1; ++v)
      for (const auto& fp : feet[v])
        tracks.persons.push_back({{fp.view, fp.index}});
  }
  for (const auto& [view, det] : leftovers)
    tracks.persons.push_back({{view, det}});
  tracks.validate();
  return tracks;
}

FrameResult process_frame(int frame_index, const FrameDetections& detections,
                          const std::vector<CameraView>& cameras,
                          const SkeletonSchema& schema,
                          const std::map<int, GroundHomography>& rectifiers,
                          const PipelineConfig& cfg) {
  FrameResult result;
  result.frame = frame_index;

  MatchOptions mo;
  mo.weights = cfg.weights;
  mo.gate = cfg.gate;
  mo.min_heel_confidence = cfg.min_heel_confidence;
  mo.dump_dir = cfg.dump_matching_dir;
  mo.frame_index = frame_index;
  result.tracks = match_views(detections, schema, rectifiers, mo);

  std::vector<CameraView> cams_by_view;
  int max_id = -1;
  for (const auto& cam : cameras) max_id = std::max(max_id, cam.id);
  cams_by_view.resize(max_id + 1);
  for (const auto& cam : cameras) cams_by_view[cam.id] = cam;

  result.poses = reconstruct_scene(result.tracks, detections, cams_by_view,
                                   schema, cfg.solver, &result.diagnostics);
  return result;
}

EvalReport evaluate_frames(
    const std::vector<FrameResult>& results,
    const std::vector<FrameDetections>& detections,
    const std::vector<CameraView>& cameras, const SkeletonSchema& schema,
    const std::vector<FramePoses>* gt_poses,
    const std::map<std::pair<int, int>, int>* gt_correspondence) {
  EvalReport report;

  // Pool reprojection stats by concatenating frames into one scene: person
  // ids and per-view detection indices get offset.
  {
    PersonTrackSet merged_tracks;
    std::vector<Pose3D> merged_poses;
    std::vector<std::vector<Detection2D>> merged_dets;
    std::vector<int> det_offset;
    int max_view = -1;
    for (const auto& cam : cameras) max_view = std::max(max_view, cam.id);
    merged_dets.resize(max_view + 1);
    det_offset.assign(max_view + 1, 0);

    std::vector<CameraView> cams_by_view(max_view + 1);
    for (const auto& cam : cameras) cams_by_view[cam.id] = cam;

    for (std::size_t f = 0; f < results.size(); ++f) {
      for (int v = 0; v <= max_view; ++v)
        det_offset[v] = static_cast<int>(merged_dets[v].size());
      const int person_offset = static_cast<int>(merged_tracks.persons.size());
      for (const auto& person : results[f].tracks.persons) {
        std::map<int, int> shifted;
        for (const auto& [view, det] : person)
          if (view <= max_view) shifted[view] = det + det_offset[view];
        merged_tracks.persons.push_back(std::move(shifted));
      }
      for (const auto& pose : results[f].poses) {
        Pose3D shifted = pose;
        shifted.person_id += person_offset;
        merged_poses.push_back(std::move(shifted));
      }
      if (f < detections.size())
        for (int v = 0; v <= max_view && v < static_cast<int>(detections[f].size()); ++v)
          merged_dets[v].insert(merged_dets[v].end(), detections[f][v].begin(),
                                detections[f][v].end());
    }
    report.reproj =
        reproj_stats(merged_poses, merged_tracks, merged_dets, cams_by_view);
  }

  if (gt_poses) {
    // 3D metrics: frame-wise evaluation, averaged over frames that match.
    double mpjpe_sum = 0.0, pcp_sum = 0.0;
    int mpjpe_frames = 0, pcp_frames = 0;
    MpjpeReport mp_pooled;
    PcpReport pcp_pooled;
    std::map<std::string, std::pair<double, int>> group_acc, part_acc;

    std::vector<OksFrame> oks_frames;
    std::vector<CameraView> cams_by_view;
    int max_view = -1;
    for (const auto& cam : cameras) max_view = std::max(max_view, cam.id);
    cams_by_view.resize(max_view + 1);
    for (const auto& cam : cameras) cams_by_view[cam.id] = cam;

    for (const auto& result : results) {
      const auto gt_frame = std::find_if(
          gt_poses->begin(), gt_poses->end(),
          [&](const FramePoses& fp) { return fp.frame == result.frame; });
      if (gt_frame == gt_poses->end()) continue;

      try {
        const MpjpeReport mp = mpjpe(result.poses, gt_frame->persons, schema);
        mpjpe_sum += mp.average_mm;
        ++mpjpe_frames;
        for (const auto& [name, v] : mp.per_group_mm) {
          group_acc[name].first += v;
          group_acc[name].second += 1;
        }
      } catch (const NoMatches&) {
      }
      try {
        const PcpReport pc = pcp(result.poses, gt_frame->persons, schema);
        pcp_sum += pc.overall;
        ++pcp_frames;
        for (const auto& [name, v] : pc.per_part) {
          part_acc[name].first += v;
          part_acc[name].second += 1;
        }
      } catch (const NoMatches&) {
      }

      // OKS on reprojections, one OksFrame per view.
      for (int v = 0; v <= max_view; ++v) {
        OksFrame of;
        auto to_keypoints = [&](const std::vector<Pose3D>& poses) {
          std::vector<PersonKeypoints2D> out;
          for (const auto& pose : poses) {
            PersonKeypoints2D kp;
            Point2 lo(1e30, 1e30), hi(-1e30, -1e30);
            bool any = false;
            for (const auto& q : pose.joints) {
              if (!q) {
                kp.joints.emplace_back(std::nullopt);
                continue;
              }
              try {
                const Point2 p = project(cams_by_view[v], *q);
                kp.joints.emplace_back(p);
                lo = lo.cwiseMin(p);
                hi = hi.cwiseMax(p);
                any = true;
              } catch (const PointAtInfinity&) {
                kp.joints.emplace_back(std::nullopt);
              }
            }
            if (!any) continue;
            kp.bbox_area = std::max((hi - lo).prod(), 1.0);
            out.push_back(std::move(kp));
          }
          return out;
        };
        of.pred = to_keypoints(result.poses);
        of.gt = to_keypoints(gt_frame->persons);
        if (!of.gt.empty()) oks_frames.push_back(std::move(of));
      }
    }

    if (mpjpe_frames) {
      mp_pooled.average_mm = mpjpe_sum / mpjpe_frames;
      for (const auto& [name, acc] : group_acc)
        mp_pooled.per_group_mm[name] = acc.first / acc.second;
      report.mpjpe = mp_pooled;
    }
    if (pcp_frames) {
      pcp_pooled.overall = pcp_sum / pcp_frames;
      for (const auto& [name, acc] : part_acc)
        pcp_pooled.per_part[name] = acc.first / acc.second;
      report.pcp = pcp_pooled;
    }
    if (!oks_frames.empty())
      report.oks = oks_ap_ar(oks_frames, default_oks_kappas(schema));
  }

  if (gt_correspondence && results.size() == 1)
    report.matching_precision =
        matching_precision(results.front().tracks, *gt_correspondence);

  return report;
}

namespace {

bool require_file(const std::string& path, const char* what) {
  if (path.empty()) {
    CP3D_LOG_ERROR("config: missing required path for %s", what);
    return false;
  }
  if (!fs::exists(path)) {
    CP3D_LOG_ERROR("config: %s file does not exist: %s", what, path.c_str());
    return false;
  }
  return true;
}

}  // namespace

int run_pipeline(const PipelineConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    CP3D_LOG_ERROR("config: %s", e.what());
    return kConfigError;
  }
  if (!require_file(cfg.calibration_path, "calibration") ||
      !require_file(cfg.detections_path, "detections"))
    return kConfigError;
  if (!cfg.schema_path.empty() && !fs::exists(cfg.schema_path)) {
    CP3D_LOG_ERROR("config: schema file does not exist: %s",
                   cfg.schema_path.c_str());
    return kConfigError;
  }

  std::vector<CameraView> cameras;
  SkeletonSchema schema;
  std::vector<FrameDetections> frames;
  std::vector<FramePoses> gt_poses;
  std::map<std::pair<int, int>, int> gt_correspondence;
  bool have_gt_poses = false, have_gt_corr = false;
  try {
    cameras = load_calibration(cfg.calibration_path);
    schema = cfg.schema_path.empty() ? default_skeleton()
                                     : load_skeleton(cfg.schema_path);
    frames = load_detections(cfg.detections_path, schema, cfg.sigma);
    if (!cfg.gt_poses_path.empty()) {
      gt_poses = load_poses(cfg.gt_poses_path);
      have_gt_poses = true;
    }
    if (!cfg.gt_correspondence_path.empty()) {
      gt_correspondence = load_correspondence(cfg.gt_correspondence_path);
      have_gt_corr = true;
    }
  } catch (const ParseError& e) {
    CP3D_LOG_ERROR("%s", e.what());
    return kParseError;
  }

  const auto rectifiers = world_rectifiers(cameras);

  std::vector<FrameResult> results(frames.size());
  const auto worker = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t f = begin; f < frames.size(); f += stride)
      results[f] = process_frame(static_cast<int>(f), frames[f], cameras,
                                 schema, rectifiers, cfg);
  };
  const int threads =
      std::max(1, std::min(cfg.threads, static_cast<int>(frames.size())));
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
    for (auto& t : pool) t.join();
  }

  fs::create_directories(cfg.output_dir);
  std::vector<FramePoses> out_frames;
  std::size_t total_poses = 0;
  for (const auto& r : results) {
    out_frames.push_back({r.frame, r.poses});
    total_poses += r.poses.size();
  }
  save_poses((fs::path(cfg.output_dir) / "poses.json").string(), out_frames);

  {
    std::ofstream diag(fs::path(cfg.output_dir) / "diagnostics.log");
    for (const auto& r : results)
      for (const auto& e : r.diagnostics.events)
        diag << "frame=" << r.frame << " person=" << e.person_id << " "
             << e.message << "\n";
  }

  if (have_gt_poses || have_gt_corr) {
    const EvalReport report = evaluate_frames(
        results, frames, cameras, schema, have_gt_poses ? &gt_poses : nullptr,
        have_gt_corr ? &gt_correspondence : nullptr);
    save_eval_report((fs::path(cfg.output_dir) / "eval.json").string(), report);
    save_eval_report_csv((fs::path(cfg.output_dir) / "eval.csv").string(),
                         report);
    if (report.reproj)
      save_histogram_csv(
          (fs::path(cfg.output_dir) / "reproj_hist.csv").string(),
          *report.reproj);
  }

  if (total_poses == 0) {
    CP3D_LOG_ERROR("no frame produced any pose");
    return kNoPoses;
  }
  return kOk;
}

}  // namespace cp3d
