// Copyright 2026 The Supertraj Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "supertraj/clustering.hpp"
#include "supertraj/config.hpp"
#include "supertraj/errors.hpp"
#include "supertraj/eval.hpp"
#include "supertraj/segmentation.hpp"
#include "supertraj/trajectory.hpp"

namespace fs = std::filesystem;
using namespace supertraj;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct GlobalOptions {
  std::string config_file;
  std::vector<std::string> overrides;  // key=value
  int workers = 0;
};

SegmentationConfig build_config(const GlobalOptions& opts) {
  SegmentationConfig config = default_config();
  if (!opts.config_file.empty()) apply_config_file(config, opts.config_file);
  for (const std::string& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: " + kv);
    apply_config_override(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.workers > 0) config.workers = opts.workers;
  validate_config(config);
  config.workers = resolve_workers(config.workers);
  config.clustering.workers = config.workers;
  config.tracking.workers = config.workers;
  return config;
}

std::string frame_name(int t) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05d", t);
  return buf;
}

nlohmann::json diagnostics_to_json(const SegmentationDiagnostics& d) {
  nlohmann::json j;
  j["trajectories"] = d.trajectory_count;
  j["mean_trajectory_length"] = d.mean_trajectory_length;
  j["foreground_trajectories"] = d.foreground_trajectories;
  j["background_trajectories"] = d.background_trajectories;
  j["outside_trajectories"] = d.outside_trajectories;
  j["unlabeled_trajectories"] = d.unlabeled_trajectories;
  j["supertrajectories"] = d.supertrajectory_count;
  j["labeled_supertrajectories"] = d.labeled_supertrajectory_count;
  j["regions"] = d.region_count;
  j["appearance_model_ok"] = d.appearance_model_ok;
  nlohmann::json timings = nlohmann::json::object();
  for (const StageTiming& t : d.timings) timings[t.stage] = t.milliseconds;
  j["timings_ms"] = std::move(timings);
  return j;
}

int cmd_track(const GlobalOptions& global, const std::string& frames_dir,
              const std::string& flow_dir, const std::string& out_path) {
  const SegmentationConfig config = build_config(global);
  std::vector<std::string> basenames;
  const VideoSequence video = load_frames_dir(frames_dir, &basenames);
  const std::vector<FlowPair> flows = load_flow_dir(flow_dir, basenames);

  TrackingConfig tracking = config.tracking;
  tracking.workers = config.workers;
  const TrajectorySet trajs = generate_trajectories(video, flows, tracking);
  write_trajectories(out_path, trajs);
  std::printf("trajectories: %zu  mean length: %.3f\n", trajs.size(), trajs.mean_length());
  return kExitOk;
}

int cmd_cluster(const GlobalOptions& global, const std::string& frames_dir,
                const std::string& traj_path, const std::string& out_path,
                const std::string& viz_dir, const std::vector<int>& viz_frames) {
  const SegmentationConfig config = build_config(global);
  const VideoSequence video = load_frames_dir(frames_dir);
  const TrajectorySet trajs = read_trajectories(traj_path);
  if (trajs.empty()) throw FormatError("trajectory file is empty: " + traj_path);

  const std::vector<TrajectoryFeatures> features =
      compute_all_features(trajs, video, config.delta_t, config.workers);
  const SuperTrajectorySet sts = generate_supertrajectories(
      trajs, features, video.width(), video.height(), video.frame_count(), config.clustering);
  write_supertrajectories(out_path, sts, trajs);
  std::printf("super-trajectories: %zu\n", sts.size());

  if (!viz_dir.empty()) {
    fs::create_directories(viz_dir);
    std::vector<int> frames = viz_frames;
    if (frames.empty()) frames.push_back(1);
    for (int t : frames) {
      if (t < 1 || t > video.frame_count()) {
        throw ContractError("visualization frame out of range: " + std::to_string(t));
      }
      const Image img = render_supertrajectory_frame(trajs, sts, t, video.width(),
                                                     video.height(), config.tracking.seed_stride);
      save_png_rgb((fs::path(viz_dir) / (frame_name(t) + ".png")).string(), img);
    }
  }
  return kExitOk;
}

int cmd_segment(const GlobalOptions& global, const std::string& frames_dir,
                const std::string& flow_dir, const std::string& mask_path,
                const std::string& out_dir, bool dump_stages,
                const std::string& diagnostics_path) {
  const SegmentationConfig config = build_config(global);
  std::vector<std::string> basenames;
  const VideoSequence video = load_frames_dir(frames_dir, &basenames);
  const std::vector<FlowPair> flows = load_flow_dir(flow_dir, basenames);
  const AnnotationMask mask = load_annotation_mask(mask_path);

  const SegmentationResult result = segment_video(video, flows, mask, config, dump_stages);

  fs::create_directories(out_dir);
  for (int t = 1; t <= video.frame_count(); ++t) {
    const std::string base = basenames[static_cast<std::size_t>(t) - 1];
    save_png_gray((fs::path(out_dir) / (base + ".png")).string(),
                  result.masks[static_cast<std::size_t>(t) - 1]);
    if (dump_stages) {
      save_png_gray((fs::path(out_dir) / (base + "_points.png")).string(),
                    result.stage_point_estimates[static_cast<std::size_t>(t) - 1]);
      save_png_gray((fs::path(out_dir) / (base + "_pixel.png")).string(),
                    result.stage_pixel_estimates[static_cast<std::size_t>(t) - 1]);
      save_png_gray((fs::path(out_dir) / (base + "_propagated.png")).string(),
                    result.stage_propagated[static_cast<std::size_t>(t) - 1]);
    }
  }

  const nlohmann::json diag = diagnostics_to_json(result.diagnostics);
  if (!diagnostics_path.empty()) {
    std::ofstream out(diagnostics_path, std::ios::trunc);
    if (!out) throw IoError("cannot write diagnostics file: " + diagnostics_path);
    out << diag.dump(2) << "\n";
  }
  std::printf("frames: %d  supertrajectories: %d  regions: %d\n", video.frame_count(),
              result.diagnostics.supertrajectory_count, result.diagnostics.region_count);
  return kExitOk;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  std::string error;
  const auto spec = parse_synthetic_spec_json(spec_path, &error);
  if (!spec) throw FormatError(error);
  const SyntheticSequence seq = generate_synthetic(*spec);
  write_synthetic_dataset(out_dir, seq);
  std::printf("wrote %d frames to %s\n", seq.video.frame_count(), out_dir.c_str());
  return kExitOk;
}

int cmd_eval(const GlobalOptions& global, const std::string& dataset_dir,
             const std::string& out_path, const std::string& sweep) {
  const SegmentationConfig config = build_config(global);

  if (sweep.empty()) {
    const EvalReport report = run_benchmark(dataset_dir, config);
    std::fputs(eval_report_table(report).c_str(), stdout);
    if (!out_path.empty()) {
      std::ofstream out(out_path, std::ios::trunc);
      if (!out) throw IoError("cannot write report file: " + out_path);
      out << eval_report_to_json(report, config);
    }
    return report.evaluated > 0 ? kExitOk : kExitData;
  }

  const auto eq = sweep.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep must be key=v1,v2,...: " + sweep);
  const std::string key = sweep.substr(0, eq);
  std::vector<std::string> values;
  std::string rest = sweep.substr(eq + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto comma = rest.find(',', pos);
    values.push_back(rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (values.empty()) throw ConfigError("sweep needs at least one value");

  nlohmann::json sweep_json;
  sweep_json["schema"] = 1;
  sweep_json["sweep_key"] = key;
  sweep_json["points"] = nlohmann::json::array();
  int evaluated_total = 0;
  std::printf("%-12s  mean IoU\n", key.c_str());
  for (const std::string& value : values) {
    SegmentationConfig point = config;
    apply_config_override(point, key, value);
    validate_config(point);
    const EvalReport report = run_benchmark(dataset_dir, point);
    evaluated_total += report.evaluated;
    std::printf("%-12s  %.4f\n", value.c_str(), report.dataset_mean);
    nlohmann::json entry;
    entry["value"] = value;
    entry["report"] = nlohmann::json::parse(eval_report_to_json(report, point));
    sweep_json["points"].push_back(std::move(entry));
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw IoError("cannot write report file: " + out_path);
    out << sweep_json.dump(2) << "\n";
  }
  return evaluated_total > 0 ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super-trajectory video label propagation"};
  app.require_subcommand(1);
  // Global options (--config/--set/--workers) may follow the subcommand.
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--config", global.config_file, "key = value configuration file");
  app.add_option("--set", global.overrides, "configuration override key=value (repeatable)");
  app.add_option("--workers", global.workers, "worker threads (0 = SUPERTRAJ_WORKERS or auto)");

  std::string frames_dir, flow_dir, mask_path, out_path, traj_path, viz_dir;
  std::string spec_path, dataset_dir, diagnostics_path, sweep;
  std::vector<int> viz_frames;
  bool dump_stages = false;

  CLI::App* track = app.add_subcommand("track", "generate dense point trajectories");
  track->add_option("--frames", frames_dir, "directory of numbered frame PNGs")->required();
  track->add_option("--flow", flow_dir, "directory of <frame>.flo / <frame>.rflo files")->required();
  track->add_option("--out", out_path, "output trajectory file")->required();

  CLI::App* cluster = app.add_subcommand("cluster", "group trajectories into super-trajectories");
  cluster->add_option("--frames", frames_dir, "directory of numbered frame PNGs")->required();
  cluster->add_option("--trajectories", traj_path, "trajectory file from `track`")->required();
  cluster->add_option("--out", out_path, "output super-trajectory file")->required();
  cluster->add_option("--viz", viz_dir, "directory for cluster visualization PNGs");
  cluster->add_option("--viz-frames", viz_frames, "frames to visualize (default: 1)");

  CLI::App* segment = app.add_subcommand("segment", "propagate the first-frame mask");
  segment->add_option("--frames", frames_dir, "directory of numbered frame PNGs")->required();
  segment->add_option("--flow", flow_dir, "directory of <frame>.flo / <frame>.rflo files")->required();
  segment->add_option("--mask", mask_path, "first-frame annotation PNG (0/255)")->required();
  segment->add_option("--out", out_path, "output directory for mask PNGs")->required();
  segment->add_flag("--dump-stages", dump_stages, "also write per-stage probability maps");
  segment->add_option("--diagnostics", diagnostics_path, "write diagnostics JSON here");

  CLI::App* synth = app.add_subcommand("synth", "render a synthetic dataset");
  synth->add_option("--spec", spec_path, "synthetic spec JSON")->required();
  synth->add_option("--out", out_path, "output sequence directory")->required();

  CLI::App* eval_cmd = app.add_subcommand("eval", "run the benchmark harness");
  eval_cmd->add_option("--dataset", dataset_dir, "dataset directory of sequences")->required();
  eval_cmd->add_option("--out", out_path, "write the JSON report here");
  eval_cmd->add_option("--sweep", sweep, "evaluate per value: key=v1,v2,...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (track->parsed()) return cmd_track(global, frames_dir, flow_dir, out_path);
    if (cluster->parsed()) {
      return cmd_cluster(global, frames_dir, traj_path, out_path, viz_dir, viz_frames);
    }
    if (segment->parsed()) {
      return cmd_segment(global, frames_dir, flow_dir, mask_path, out_path, dump_stages,
                         diagnostics_path);
    }
    if (synth->parsed()) return cmd_synth(spec_path, out_path);
    if (eval_cmd->parsed()) return cmd_eval(global, dataset_dir, out_path, sweep);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
