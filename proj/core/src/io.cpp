#include "crowdpose3d/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crowdpose3d/log.hpp"

namespace cp3d {

using json = nlohmann::ordered_json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json point_list(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

}  // namespace

std::vector<CameraView> load_calibration(const std::string& path) {
  const json j = read_json(path);
  std::vector<CameraView> cameras;
  try {
    for (const auto& rec : j) {
      CameraView cam;
      cam.id = rec.at("id").get<int>();
      cam.width = rec.at("width").get<int>();
      cam.height = rec.at("height").get<int>();
      const auto& P = rec.at("P");
      if (P.size() != 3) throw ParseError(path + ": P must have 3 rows");
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) cam.P(r, c) = P.at(r).at(c).get<double>();
      cameras.push_back(cam);
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return cameras;
}

void save_calibration(const std::string& path,
                      const std::vector<CameraView>& cameras) {
  json j = json::array();
  for (const auto& cam : cameras) {
    json P = json::array();
    for (int r = 0; r < 3; ++r) {
      json row = json::array();
      for (int c = 0; c < 4; ++c) row.push_back(cam.P(r, c));
      P.push_back(row);
    }
    j.push_back({{"id", cam.id},
                 {"P", P},
                 {"width", cam.width},
                 {"height", cam.height}});
  }
  write_json(path, j);
}

SkeletonSchema load_skeleton(const std::string& path) {
  const json j = read_json(path);
  SkeletonSchema s;
  try {
    s.joint_names = j.at("joint_names").get<std::vector<std::string>>();
    for (const auto& b : j.at("bones"))
      s.bones.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
    s.b_ref = j.at("b_ref").get<std::vector<double>>();
    s.sigma_bone = j.at("sigma_bone").get<std::vector<double>>();
    s.left_foot = j.at("foot_indices").at("left").get<std::vector<int>>();
    s.right_foot = j.at("foot_indices").at("right").get<std::vector<int>>();
    s.left_heel = j.at("heel_indices").at("left").get<int>();
    s.right_heel = j.at("heel_indices").at("right").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": " + e.what());
  }
  return s;
}

void save_skeleton(const std::string& path, const SkeletonSchema& schema) {
  json bones = json::array();
  for (const auto& [a, b] : schema.bones) bones.push_back(json::array({a, b}));
  const json j = {
      {"joint_names", schema.joint_names},
      {"bones", bones},
      {"b_ref", schema.b_ref},
      {"sigma_bone", schema.sigma_bone},
      {"foot_indices",
       {{"left", schema.left_foot}, {"right", schema.right_foot}}},
      {"heel_indices",
       {{"left", schema.left_heel}, {"right", schema.right_heel}}},
  };
  write_json(path, j);
}

std::vector<FrameDetections> load_detections(const std::string& path,
                                             const SkeletonSchema& schema,
                                             const SigmaModel& sigma_cfg) {
  const json j = read_json(path);
  const int m = schema.joint_count();
  std::vector<FrameDetections> frames;
  try {
    for (const auto& frame_rec : j) {
      int max_view = -1;
      for (const auto& view_rec : frame_rec)
        max_view = std::max(max_view, view_rec.at("view").get<int>());
      FrameDetections frame(max_view + 1);
      for (const auto& view_rec : frame_rec) {
        const int view = view_rec.at("view").get<int>();
        auto& dets = frame.at(view);
        for (const auto& person : view_rec.at("persons")) {
          Detection2D det;
          det.view = view;
          det.person_index = static_cast<int>(dets.size());
          const auto& bbox = person.at("bbox");
          det.bbox = {bbox.at(0).get<double>(), bbox.at(1).get<double>(),
                      bbox.at(2).get<double>(), bbox.at(3).get<double>()};
          const auto& joints = person.at("joints");
          if (static_cast<int>(joints.size()) != m)
            throw ParseError(path + ": joint count disagrees with the schema");
          det.joints.assign(m, JointObs{});
          det.sigma.assign(m, 1.0);
          for (int k = 0; k < m; ++k) {
            if (joints.at(k).is_null()) continue;
            JointObs obs;
            obs.position =
                Point2(joints.at(k).at(0).get<double>(), joints.at(k).at(1).get<double>());
            obs.confidence = joints.at(k).at(2).get<double>();
            obs.present = true;
            det.joints[k] = obs;
            det.sigma[k] = sigma_model(det.bbox, obs.confidence, sigma_cfg);
          }
          dets.push_back(std::move(det));
        }
      }
      frames.push_back(std::move(frame));
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return frames;
}

void save_detections(const std::string& path,
                     const std::vector<FrameDetections>& frames) {
  json j = json::array();
  for (const auto& frame : frames) {
    json frame_rec = json::array();
    for (std::size_t view = 0; view < frame.size(); ++view) {
      json persons = json::array();
      for (const auto& det : frame[view]) {
        json joints = json::array();
        for (const auto& obs : det.joints) {
          if (obs.present)
            joints.push_back(json::array(
                {obs.position.x(), obs.position.y(), obs.confidence}));
          else
            joints.push_back(nullptr);
        }
        persons.push_back(
            {{"bbox", json::array({det.bbox.x, det.bbox.y, det.bbox.w, det.bbox.h})},
             {"joints", joints}});
      }
      frame_rec.push_back({{"view", static_cast<int>(view)}, {"persons", persons}});
    }
    j.push_back(frame_rec);
  }
  write_json(path, j);
}

std::vector<GroundCorrespondences> load_ground_correspondences(
    const std::string& path) {
  const json j = read_json(path);
  std::vector<GroundCorrespondences> sets;
  try {
    for (const auto& rec : j) {
      GroundCorrespondences gc;
      gc.view_a = rec.at("view_a").get<int>();
      gc.view_b = rec.at("view_b").get<int>();
      for (const auto& p : rec.at("points")) {
        const Point2 in_a(p.at(0).get<double>(), p.at(1).get<double>());
        const Point2 in_b(p.at(2).get<double>(), p.at(3).get<double>());
        gc.points.emplace_back(in_b, in_a);  // src in view_b, dst in view_a
      }
      sets.push_back(std::move(gc));
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return sets;
}

void save_ground_correspondences(
    const std::string& path, const std::vector<GroundCorrespondences>& sets) {
  json j = json::array();
  for (const auto& gc : sets) {
    json points = json::array();
    for (const auto& [in_b, in_a] : gc.points)
      points.push_back(json::array({in_a.x(), in_a.y(), in_b.x(), in_b.y()}));
    j.push_back(
        {{"view_a", gc.view_a}, {"view_b", gc.view_b}, {"points", points}});
  }
  write_json(path, j);
}

std::vector<GroundHomography> load_homographies(const std::string& path) {
  const json j = read_json(path);
  std::vector<GroundHomography> hs;
  try {
    for (const auto& rec : j) {
      GroundHomography h;
      h.from_view = rec.at("from_view").get<int>();
      h.to_view = rec.at("to_view").get<int>();
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          h.H(r, c) = rec.at("H").at(r).at(c).get<double>();
      hs.push_back(h);
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return hs;
}

void save_homographies(const std::string& path,
                       const std::vector<GroundHomography>& hs) {
  json j = json::array();
  for (const auto& h : hs) {
    json H = json::array();
    for (int r = 0; r < 3; ++r) {
      json row = json::array();
      for (int c = 0; c < 3; ++c) row.push_back(h.H(r, c));
      H.push_back(row);
    }
    j.push_back(
        {{"from_view", h.from_view}, {"to_view", h.to_view}, {"H", H}});
  }
  write_json(path, j);
}

namespace {

json pose_to_json(const Pose3D& pose) {
  json joints = json::array();
  for (const auto& q : pose.joints) {
    if (q)
      joints.push_back(point_list(*q));
    else
      joints.push_back(nullptr);
  }
  return {{"id", pose.person_id},
          {"joints", joints},
          {"nll", pose.nll},
          {"reproj_rms", pose.reproj_rms}};
}

Pose3D pose_from_json(const json& rec) {
  Pose3D pose;
  pose.person_id = rec.at("id").get<int>();
  for (const auto& q : rec.at("joints")) {
    if (q.is_null()) {
      pose.joints.emplace_back(std::nullopt);
    } else {
      pose.joints.emplace_back(Point3(q.at(0).get<double>(), q.at(1).get<double>(),
                                      q.at(2).get<double>()));
    }
    pose.per_joint_views.push_back(0);
  }
  pose.nll = rec.at("nll").get<double>();
  pose.reproj_rms = rec.at("reproj_rms").get<double>();
  return pose;
}

}  // namespace

std::string poses_to_json(const std::vector<FramePoses>& frames) {
  json j = json::array();
  for (const auto& frame : frames) {
    json persons = json::array();
    for (const auto& pose : frame.persons) persons.push_back(pose_to_json(pose));
    j.push_back({{"frame", frame.frame}, {"persons", persons}});
  }
  return j.dump(2) + "\n";
}

void save_poses(const std::string& path, const std::vector<FramePoses>& frames) {
  write_text(path, poses_to_json(frames));
}

std::vector<FramePoses> load_poses(const std::string& path) {
  const json j = read_json(path);
  std::vector<FramePoses> frames;
  try {
    for (const auto& frame_rec : j) {
      FramePoses fp;
      fp.frame = frame_rec.at("frame").get<int>();
      for (const auto& rec : frame_rec.at("persons"))
        fp.persons.push_back(pose_from_json(rec));
      frames.push_back(std::move(fp));
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return frames;
}

void save_tracks(const std::string& path, const PersonTrackSet& tracks) {
  json persons = json::array();
  for (const auto& person : tracks.persons) {
    json dets = json::array();
    for (const auto& [view, det] : person)
      dets.push_back({{"view", view}, {"index", det}});
    persons.push_back({{"detections", dets}});
  }
  write_json(path, json{{"persons", persons}});
}

PersonTrackSet load_tracks(const std::string& path) {
  const json j = read_json(path);
  PersonTrackSet tracks;
  try {
    for (const auto& person : j.at("persons")) {
      std::map<int, int> m;
      for (const auto& det : person.at("detections"))
        m[det.at("view").get<int>()] = det.at("index").get<int>();
      tracks.persons.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return tracks;
}

void save_correspondence(const std::string& path,
                         const std::map<std::pair<int, int>, int>& map) {
  json j = json::array();
  for (const auto& [key, person] : map)
    j.push_back({{"view", key.first}, {"detection", key.second}, {"person", person}});
  write_json(path, j);
}

std::map<std::pair<int, int>, int> load_correspondence(const std::string& path) {
  const json j = read_json(path);
  std::map<std::pair<int, int>, int> map;
  try {
    for (const auto& rec : j)
      map[{rec.at("view").get<int>(), rec.at("detection").get<int>()}] =
          rec.at("person").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return map;
}

namespace {

json eval_report_to_json(const EvalReport& report) {
  json j = json::object();
  if (report.mpjpe) {
    json groups = json::object();
    for (const auto& [name, value] : report.mpjpe->per_group_mm)
      groups[name] = value;
    j["mpjpe_mm"] = {{"average", report.mpjpe->average_mm}, {"per_group", groups}};
  }
  if (report.pcp) {
    json parts = json::object();
    for (const auto& [name, value] : report.pcp->per_part) parts[name] = value;
    j["pcp"] = {{"overall", report.pcp->overall}, {"per_part", parts}};
  }
  if (report.oks) {
    const OksReport& o = *report.oks;
    j["oks"] = {{"AP", o.ap},       {"AP50", o.ap50}, {"AP75", o.ap75},
                {"AP_M", o.ap_medium}, {"AP_L", o.ap_large}, {"AR", o.ar},
                {"AR50", o.ar50},   {"AR75", o.ar75}, {"AR_M", o.ar_medium},
                {"AR_L", o.ar_large}};
  }
  if (report.reproj) {
    j["reproj_px"] = {{"ave", report.reproj->ave},
                      {"min", report.reproj->min},
                      {"max", report.reproj->max},
                      {"var", report.reproj->var}};
  }
  if (report.matching_precision)
    j["matching_precision"] = *report.matching_precision;
  return j;
}

}  // namespace

void save_eval_report(const std::string& json_path, const EvalReport& report) {
  write_json(json_path, eval_report_to_json(report));
}

void save_eval_report_csv(const std::string& csv_path, const EvalReport& report) {
  std::ostringstream out;
  out << "metric,value\n";
  const json j = eval_report_to_json(report);
  // Flatten one level: section.key,value
  for (const auto& [section, value] : j.items()) {
    if (value.is_number()) {
      out << section << ',' << value.dump() << '\n';
      continue;
    }
    for (const auto& [key, inner] : value.items()) {
      if (inner.is_number()) {
        out << section << '.' << key << ',' << inner.dump() << '\n';
      } else {
        for (const auto& [name, leaf] : inner.items())
          out << section << '.' << key << '.' << name << ',' << leaf.dump()
              << '\n';
      }
    }
  }
  write_text(csv_path, out.str());
}

void save_histogram_csv(const std::string& csv_path, const ReprojStats& stats) {
  std::ostringstream out;
  out << "bin_left_px,count\n";
  for (std::size_t i = 0; i < stats.histogram.size(); ++i)
    out << json(i * stats.bin_width_px).dump() << ',' << stats.histogram[i]
        << '\n';
  write_text(csv_path, out.str());
}

void export_scene(const std::string& dir, const GroundTruth& gt) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto path = [&dir](const char* name) {
    return (fs::path(dir) / name).string();
  };

  save_calibration(path("calibration.json"), gt.cameras);
  save_detections(path("detections.json"), {gt.detections});
  save_homographies(path("homographies.json"), gt.homographies);
  save_correspondence(path("gt_correspondence.json"), gt.correspondence);
  save_skeleton(path("skeleton.json"), default_skeleton());

  FramePoses frame;
  frame.frame = 0;
  frame.persons = gt.poses3d;
  save_poses(path("gt_poses.json"), {frame});
}

}  // namespace cp3d
