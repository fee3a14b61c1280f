// crowdpose3d command line: multi-view crowd matching, 3D reconstruction,
// synthetic scenes, evaluation, and timing sweeps.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "crowdpose3d/bench.hpp"
#include "crowdpose3d/io.hpp"
#include "crowdpose3d/log.hpp"
#include "crowdpose3d/pipeline.hpp"
#include "crowdpose3d/synth.hpp"

namespace fs = std::filesystem;
using namespace cp3d;

namespace {

void add_config_flag(CLI::App* cmd, std::string* config_path) {
  cmd->add_option("--config", *config_path, "JSON config file; flags override");
}

void add_matching_flags(CLI::App* cmd, PipelineConfig* cfg) {
  cmd->add_option("--k1", cfg->weights.k1, "foot location weight");
  cmd->add_option("--k2", cfg->weights.k2, "stride size weight");
  cmd->add_option("--k3", cfg->weights.k3, "stride direction weight");
  cmd->add_option("--gate", cfg->gate, "max accepted edge cost");
}

PipelineConfig base_config(const std::string& config_path) {
  if (config_path.empty()) return PipelineConfig{};
  return load_pipeline_config(config_path);
}

int run_command(const PipelineConfig& cfg) { return run_pipeline(cfg); }

int synth_command(PipelineConfig cfg, bool evaluate) {
  cfg.scene.validate();
  const GroundTruth gt = generate(cfg.scene);
  fs::create_directories(cfg.output_dir);
  export_scene(cfg.output_dir, gt);
  std::printf("scene written to %s (%d persons, %d views)\n",
              cfg.output_dir.c_str(), cfg.scene.n_persons, cfg.scene.n_views);
  if (!evaluate) return kOk;

  PipelineConfig run_cfg = cfg;
  run_cfg.calibration_path = (fs::path(cfg.output_dir) / "calibration.json").string();
  run_cfg.detections_path = (fs::path(cfg.output_dir) / "detections.json").string();
  run_cfg.schema_path = (fs::path(cfg.output_dir) / "skeleton.json").string();
  run_cfg.gt_poses_path = (fs::path(cfg.output_dir) / "gt_poses.json").string();
  run_cfg.gt_correspondence_path =
      (fs::path(cfg.output_dir) / "gt_correspondence.json").string();
  run_cfg.output_dir = (fs::path(cfg.output_dir) / "run").string();
  const int status = run_pipeline(run_cfg);
  if (status == kOk)
    std::printf("evaluation written to %s\n",
                (fs::path(run_cfg.output_dir) / "eval.json").string().c_str());
  return status;
}

int eval_command(const std::string& pred_path, const std::string& gt_path,
                 const std::string& schema_path, const std::string& out_dir) {
  SkeletonSchema schema =
      schema_path.empty() ? default_skeleton() : load_skeleton(schema_path);
  const auto pred = load_poses(pred_path);
  const auto gt = load_poses(gt_path);

  EvalReport report;
  double mpjpe_sum = 0.0, pcp_sum = 0.0;
  int mp_frames = 0, pcp_frames = 0;
  MpjpeReport mp_pooled;
  PcpReport pcp_pooled;
  std::map<std::string, std::pair<double, int>> group_acc, part_acc;
  for (const auto& pf : pred) {
    const auto gt_frame =
        std::find_if(gt.begin(), gt.end(), [&](const FramePoses& fp) {
          return fp.frame == pf.frame;
        });
    if (gt_frame == gt.end()) continue;
    try {
      const MpjpeReport mp = mpjpe(pf.persons, gt_frame->persons, schema);
      mpjpe_sum += mp.average_mm;
      ++mp_frames;
      for (const auto& [name, v] : mp.per_group_mm) {
        group_acc[name].first += v;
        group_acc[name].second += 1;
      }
    } catch (const NoMatches&) {
    }
    try {
      const PcpReport pc = pcp(pf.persons, gt_frame->persons, schema);
      pcp_sum += pc.overall;
      ++pcp_frames;
      for (const auto& [name, v] : pc.per_part) {
        part_acc[name].first += v;
        part_acc[name].second += 1;
      }
    } catch (const NoMatches&) {
    }
  }
  if (mp_frames) {
    mp_pooled.average_mm = mpjpe_sum / mp_frames;
    for (const auto& [name, acc] : group_acc)
      mp_pooled.per_group_mm[name] = acc.first / acc.second;
    report.mpjpe = mp_pooled;
    std::printf("MPJPE %.3f mm over %d frame(s)\n", mp_pooled.average_mm,
                mp_frames);
  }
  if (pcp_frames) {
    pcp_pooled.overall = pcp_sum / pcp_frames;
    for (const auto& [name, acc] : part_acc)
      pcp_pooled.per_part[name] = acc.first / acc.second;
    report.pcp = pcp_pooled;
    std::printf("PCP %.2f%% over %d frame(s)\n", pcp_pooled.overall, pcp_frames);
  }
  if (!mp_frames && !pcp_frames) {
    std::fprintf(stderr, "no comparable frames between %s and %s\n",
                 pred_path.c_str(), gt_path.c_str());
    return kNoPoses;
  }

  fs::create_directories(out_dir);
  save_eval_report((fs::path(out_dir) / "eval.json").string(), report);
  save_eval_report_csv((fs::path(out_dir) / "eval.csv").string(), report);
  return kOk;
}

int match_command(const PipelineConfig& cfg) {
  if (cfg.detections_path.empty() || !fs::exists(cfg.detections_path)) {
    CP3D_LOG_ERROR("match: detections file missing: %s",
                   cfg.detections_path.c_str());
    return kConfigError;
  }

  SkeletonSchema schema = cfg.schema_path.empty()
                              ? default_skeleton()
                              : load_skeleton(cfg.schema_path);

  std::map<int, GroundHomography> rectifiers;
  if (!cfg.calibration_path.empty()) {
    rectifiers = world_rectifiers(load_calibration(cfg.calibration_path));
  } else if (!cfg.homographies_path.empty()) {
    rectifiers = compose_rectifiers(load_homographies(cfg.homographies_path));
  } else if (!cfg.correspondences_path.empty()) {
    std::vector<GroundHomography> hs;
    for (const auto& gc :
         load_ground_correspondences(cfg.correspondences_path))
      hs.push_back(estimate_homography(gc.points, gc.view_b, gc.view_a));
    rectifiers = compose_rectifiers(hs);
  } else {
    CP3D_LOG_ERROR(
        "match: need --calib, --homographies, or --correspondences");
    return kConfigError;
  }

  const auto frames = load_detections(cfg.detections_path, schema, cfg.sigma);
  fs::create_directories(cfg.output_dir);
  MatchOptions mo;
  mo.weights = cfg.weights;
  mo.gate = cfg.gate;
  mo.min_heel_confidence = cfg.min_heel_confidence;
  mo.dump_dir = cfg.dump_matching_dir;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    mo.frame_index = static_cast<int>(f);
    const PersonTrackSet tracks = match_views(frames[f], schema, rectifiers, mo);
    char name[64];
    std::snprintf(name, sizeof(name), "tracks_%04zu.json", f);
    save_tracks((fs::path(cfg.output_dir) / name).string(), tracks);
  }
  std::printf("matched %zu frame(s) into %s\n", frames.size(),
              cfg.output_dir.c_str());
  return kOk;
}

int bench_command(const std::vector<int>& sizes, int reps,
                  const std::string& out_path) {
  const auto rows = bench_sweep(sizes, reps);
  const std::string csv = bench_csv(rows);
  if (out_path.empty() || out_path == "-") {
    std::fputs(csv.c_str(), stdout);
  } else {
    std::ofstream out(out_path);
    out << csv;
    std::printf("bench table written to %s\n", out_path.c_str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  const std::set<std::string> known = {"run",  "synth", "eval",  "match",
                                       "bench", "-h",    "--help", "--version"};
  if (argc >= 2 && !known.count(argv[1])) {
    std::fprintf(stderr,
                 "unknown subcommand '%s'\n"
                 "usage: crowdpose3d <run|synth|eval|match|bench> [options]\n",
                 argv[1]);
    return kUsageError;
  }

  CLI::App app{"multi-view 3D crowd pose reconstruction"};
  app.require_subcommand(1);

  PipelineConfig cli_cfg;
  std::string config_path;

  // run
  auto* run = app.add_subcommand("run", "full pipeline on detection files");
  add_config_flag(run, &config_path);
  run->add_option("--calib", cli_cfg.calibration_path, "calibration JSON");
  run->add_option("--detections", cli_cfg.detections_path, "detections JSON");
  run->add_option("--schema", cli_cfg.schema_path, "skeleton schema JSON");
  run->add_option("--gt-poses", cli_cfg.gt_poses_path, "ground-truth poses");
  run->add_option("--gt-correspondence", cli_cfg.gt_correspondence_path,
                  "ground-truth matching correspondence");
  run->add_option("--out", cli_cfg.output_dir, "output directory");
  run->add_option("--dump-matching", cli_cfg.dump_matching_dir,
                  "dump per-pair cost matrices into a directory");
  run->add_option("--threads", cli_cfg.threads, "frame worker threads");
  add_matching_flags(run, &cli_cfg);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene");
  add_config_flag(synth, &config_path);
  bool no_eval = false;
  synth->add_option("--persons", cli_cfg.scene.n_persons, "person count");
  synth->add_option("--views", cli_cfg.scene.n_views, "camera count");
  synth->add_option("--noise", cli_cfg.scene.noise_px, "pixel noise sigma");
  synth->add_option("--occlusion", cli_cfg.scene.occlusion_rate,
                    "per-joint occlusion rate");
  synth->add_option("--swap", cli_cfg.scene.swap_rate,
                    "per-joint crowd swap rate");
  synth->add_option("--seed", cli_cfg.scene.seed, "RNG seed");
  synth->add_option("--min-spacing", cli_cfg.scene.min_spacing_m,
                    "minimum person spacing (m)");
  synth->add_option("--out", cli_cfg.output_dir, "scene directory");
  synth->add_flag("--no-eval", no_eval, "only export, skip pipeline + eval");
  add_matching_flags(synth, &cli_cfg);

  // eval
  auto* eval = app.add_subcommand("eval", "compare pose files (MPJPE, PCP)");
  std::string pred_path, gt_path;
  eval->add_option("--pred", pred_path, "predicted poses JSON")->required();
  eval->add_option("--gt", gt_path, "ground-truth poses JSON")->required();
  eval->add_option("--schema", cli_cfg.schema_path, "skeleton schema JSON");
  eval->add_option("--out", cli_cfg.output_dir, "output directory");

  // match
  auto* match = app.add_subcommand("match", "matching stage only");
  add_config_flag(match, &config_path);
  match->add_option("--calib", cli_cfg.calibration_path, "calibration JSON");
  match->add_option("--detections", cli_cfg.detections_path, "detections JSON");
  match->add_option("--schema", cli_cfg.schema_path, "skeleton schema JSON");
  match->add_option("--homographies", cli_cfg.homographies_path,
                    "cached pairwise homographies JSON");
  match->add_option("--correspondences", cli_cfg.correspondences_path,
                    "ground-plane correspondence JSON");
  match->add_option("--out", cli_cfg.output_dir, "output directory");
  match->add_option("--dump-matching", cli_cfg.dump_matching_dir,
                    "dump per-pair cost matrices into a directory");
  add_matching_flags(match, &cli_cfg);

  // bench
  auto* bench = app.add_subcommand("bench", "timing sweep of LAP and solver");
  std::vector<int> sizes{8, 16, 32, 64};
  int reps = 5;
  std::string bench_out;
  bench->add_option("--n", sizes, "sweep sizes")->delimiter(',');
  bench->add_option("--reps", reps, "repetitions per measurement");
  bench->add_option("--out", bench_out, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    // Config file first, then re-parse so explicit flags win.
    if (!config_path.empty()) {
      PipelineConfig from_file = base_config(config_path);
      const SceneSpec scene_defaults = cli_cfg.scene;
      (void)scene_defaults;
      cli_cfg = from_file;
      app.clear();
      (void)app.parse(argc, argv);
    }

    if (run->parsed()) return run_command(cli_cfg);
    if (synth->parsed()) return synth_command(cli_cfg, !no_eval);
    if (eval->parsed())
      return eval_command(pred_path, gt_path, cli_cfg.schema_path,
                          cli_cfg.output_dir);
    if (match->parsed()) return match_command(cli_cfg);
    if (bench->parsed()) return bench_command(sizes, reps, bench_out);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kParseError;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kParseError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }
  return kOk;
}
