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

#include "supertraj/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "supertraj/errors.hpp"

namespace supertraj {

namespace fs = std::filesystem;

namespace {

// Deterministic per-pixel hash noise in [-amplitude, amplitude].
int hash_noise(int x, int y, std::uint32_t salt, int amplitude) {
  if (amplitude == 0) return 0;
  std::uint32_t h = static_cast<std::uint32_t>(x) * 73856093u ^
                    static_cast<std::uint32_t>(y) * 19349663u ^ salt * 83492791u;
  h ^= h >> 13;
  h *= 0x85ebca6bu;
  h ^= h >> 16;
  return static_cast<int>(h % static_cast<std::uint32_t>(2 * amplitude + 1)) - amplitude;
}

std::array<std::uint8_t, 3> noisy_color(std::array<std::uint8_t, 3> base, int x, int y,
                                        std::uint32_t salt, int amplitude) {
  std::array<std::uint8_t, 3> out;
  for (int c = 0; c < 3; ++c) {
    const int v = static_cast<int>(base[static_cast<std::size_t>(c)]) +
                  hash_noise(x, y, salt + static_cast<std::uint32_t>(c), amplitude);
    out[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
  }
  return out;
}

struct ObjectPose {
  double x = 0.0;
  double y = 0.0;
};

ObjectPose pose_at(const SyntheticObject& obj, int frame) {
  return {obj.x0 + (frame - 1) * obj.vx, obj.y0 + (frame - 1) * obj.vy};
}

bool covers(const SyntheticObject& obj, const ObjectPose& pose, int px, int py) {
  if (obj.shape == ObjectShape::rectangle) {
    return px >= pose.x && px < pose.x + obj.size_x && py >= pose.y && py < pose.y + obj.size_y;
  }
  const double rx = obj.size_x / 2.0;
  const double ry = obj.size_y / 2.0;
  const double dx = (px - (pose.x + rx)) / rx;
  const double dy = (py - (pose.y + ry)) / ry;
  return dx * dx + dy * dy <= 1.0;
}

bool occluder_covers(const OccluderSpec& occ, int frame, int px) {
  return frame >= occ.first_frame && frame <= occ.last_frame && px >= occ.x &&
         px < occ.x + occ.width;
}

std::string frame_name(int t) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05d", t);
  return buf;
}

std::vector<std::string> sorted_pngs(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::is_directory(dir)) return names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".png") names.push_back(entry.path().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

double iou(const GrayImage& mask, const GrayImage& gt, bool empty_union_is_one) {
  if (mask.width != gt.width || mask.height != gt.height) {
    throw ContractError("IoU requires equal mask dimensions");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    const bool a = mask.data[i] != 0;
    const bool b = gt.data[i] != 0;
    inter += (a && b) ? 1 : 0;
    uni += (a || b) ? 1 : 0;
  }
  if (uni == 0) return empty_union_is_one ? 1.0 : 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

SyntheticSequence generate_synthetic(const SyntheticSpec& spec) {
  if (spec.width < 2 || spec.height < 2 || spec.frame_count < 2) {
    throw ContractError("synthetic spec needs at least a 2x2x2 volume");
  }
  constexpr std::uint32_t kBgSalt = 11u;
  constexpr std::uint32_t kObjSalt = 311u;
  constexpr std::uint32_t kIntruderSalt = 611u;
  constexpr std::uint32_t kOccluderSalt = 911u;

  SyntheticSequence seq;
  seq.flows = make_flow_pairs(spec.frame_count);

  // visible[t]: 0 = background, 1 = target, 2 = intruder, 3 = occluder.
  std::vector<std::vector<std::uint8_t>> visible(
      static_cast<std::size_t>(spec.frame_count) + 1,
      std::vector<std::uint8_t>(static_cast<std::size_t>(spec.width) * spec.height, 0));

  for (int t = 1; t <= spec.frame_count; ++t) {
    const ObjectPose obj_pose = pose_at(spec.object, t);
    const ObjectPose intr_pose = spec.intruder ? pose_at(*spec.intruder, t) : ObjectPose{};

    Image frame(spec.width, spec.height);
    GrayImage gt(spec.width, spec.height, 0);
    GrayImage intruder_gt(spec.width, spec.height, 0);
    auto& vis = visible[static_cast<std::size_t>(t)];

    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        std::array<std::uint8_t, 3> color =
            noisy_color(spec.background_color, x, y, kBgSalt, spec.background_noise);
        std::uint8_t kind = 0;
        if (covers(spec.object, obj_pose, x, y)) {
          const int lx = x - static_cast<int>(std::lround(obj_pose.x));
          const int ly = y - static_cast<int>(std::lround(obj_pose.y));
          color = noisy_color(spec.object.color, lx, ly, kObjSalt, spec.object.noise);
          kind = 1;
        }
        if (spec.intruder && covers(*spec.intruder, intr_pose, x, y)) {
          const int lx = x - static_cast<int>(std::lround(intr_pose.x));
          const int ly = y - static_cast<int>(std::lround(intr_pose.y));
          color = noisy_color(spec.intruder->color, lx, ly, kIntruderSalt, spec.intruder->noise);
          kind = 2;
        }
        if (spec.occluder && occluder_covers(*spec.occluder, t, x)) {
          color = noisy_color(spec.occluder->color, x, y, kOccluderSalt, spec.occluder->noise);
          kind = 3;
        }
        frame.set(x, y, color);
        if (kind == 1) gt.set(x, y, 255);
        if (kind == 2) intruder_gt.set(x, y, 255);
        vis[static_cast<std::size_t>(y) * spec.width + x] = kind;
      }
    }
    seq.video.frames.push_back(std::move(frame));
    seq.gt.push_back(std::move(gt));
    if (spec.intruder) seq.intruder_gt.push_back(std::move(intruder_gt));
  }

  // Exact flow from the visibility maps: moving-object pixels carry their
  // object's velocity, everything else stays still.
  for (int t = 1; t <= spec.frame_count; ++t) {
    const auto& vis = visible[static_cast<std::size_t>(t)];
    if (t < spec.frame_count) {
      FlowField fwd(spec.width, spec.height);
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          const std::uint8_t kind = vis[static_cast<std::size_t>(y) * spec.width + x];
          if (kind == 1) {
            fwd.set(x, y, {static_cast<float>(spec.object.vx), static_cast<float>(spec.object.vy)});
          } else if (kind == 2) {
            fwd.set(x, y, {static_cast<float>(spec.intruder->vx), static_cast<float>(spec.intruder->vy)});
          }
        }
      }
      seq.flows[static_cast<std::size_t>(t)].forward = std::move(fwd);
    }
    if (t > 1) {
      FlowField bwd(spec.width, spec.height);
      for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
          const std::uint8_t kind = vis[static_cast<std::size_t>(y) * spec.width + x];
          if (kind == 1) {
            bwd.set(x, y, {static_cast<float>(-spec.object.vx), static_cast<float>(-spec.object.vy)});
          } else if (kind == 2) {
            bwd.set(x, y, {static_cast<float>(-spec.intruder->vx), static_cast<float>(-spec.intruder->vy)});
          }
        }
      }
      seq.flows[static_cast<std::size_t>(t)].backward = std::move(bwd);
    }
  }

  seq.first_mask = AnnotationMask(spec.width, spec.height);
  for (std::size_t i = 0; i < seq.gt.front().data.size(); ++i) {
    seq.first_mask.fg[i] = seq.gt.front().data[i] != 0 ? 1 : 0;
  }
  return seq;
}

void write_synthetic_dataset(const std::string& dir, const SyntheticSequence& seq) {
  const fs::path root(dir);
  fs::create_directories(root / "frames");
  fs::create_directories(root / "flow");
  fs::create_directories(root / "gt");

  const int frame_count = seq.video.frame_count();
  for (int t = 1; t <= frame_count; ++t) {
    save_png_rgb((root / "frames" / (frame_name(t) + ".png")).string(), seq.video.frame(t));
    save_png_gray((root / "gt" / (frame_name(t) + ".png")).string(),
                  seq.gt[static_cast<std::size_t>(t) - 1]);
    if (t < frame_count) {
      write_flo((root / "flow" / (frame_name(t) + ".flo")).string(),
                seq.flows[static_cast<std::size_t>(t)].forward);
    }
    if (t > 1) {
      write_flo((root / "flow" / (frame_name(t) + ".rflo")).string(),
                seq.flows[static_cast<std::size_t>(t)].backward);
    }
  }

  GrayImage mask(seq.first_mask.width, seq.first_mask.height, 0);
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    mask.data[i] = seq.first_mask.fg[i] ? 255 : 0;
  }
  save_png_gray((root / "mask.png").string(), mask);
}

std::optional<SyntheticSpec> parse_synthetic_spec_json(const std::string& path,
                                                       std::string* error) {
  std::ifstream in(path);
  if (!in) {
    if (error) *error = "cannot open spec file: " + path;
    return std::nullopt;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    if (error) *error = std::string("bad JSON: ") + e.what();
    return std::nullopt;
  }

  auto parse_color = [](const nlohmann::json& node) {
    return std::array<std::uint8_t, 3>{node.at(0).get<std::uint8_t>(),
                                       node.at(1).get<std::uint8_t>(),
                                       node.at(2).get<std::uint8_t>()};
  };
  auto parse_object = [&](const nlohmann::json& node) {
    SyntheticObject obj;
    const std::string shape = node.value("shape", "rectangle");
    if (shape == "disk") {
      obj.shape = ObjectShape::disk;
    } else if (shape != "rectangle") {
      throw FormatError("unknown object shape: " + shape);
    }
    obj.size_x = node.value("size_x", obj.size_x);
    obj.size_y = node.value("size_y", obj.size_y);
    obj.x0 = node.at("x0").get<double>();
    obj.y0 = node.at("y0").get<double>();
    obj.vx = node.value("vx", 0.0);
    obj.vy = node.value("vy", 0.0);
    if (node.contains("color")) obj.color = parse_color(node.at("color"));
    obj.noise = node.value("noise", 0);
    return obj;
  };

  try {
    SyntheticSpec spec;
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    spec.frame_count = j.at("frames").get<int>();
    if (j.contains("background_color")) spec.background_color = parse_color(j.at("background_color"));
    spec.background_noise = j.value("background_noise", 0);
    spec.object = parse_object(j.at("object"));
    if (j.contains("intruder")) spec.intruder = parse_object(j.at("intruder"));
    if (j.contains("occluder")) {
      OccluderSpec occ;
      const auto& node = j.at("occluder");
      occ.x = node.at("x").get<double>();
      occ.width = node.at("width").get<double>();
      occ.first_frame = node.at("first_frame").get<int>();
      occ.last_frame = node.at("last_frame").get<int>();
      if (node.contains("color")) occ.color = parse_color(node.at("color"));
      occ.noise = node.value("noise", 0);
      spec.occluder = occ;
    }
    return spec;
  } catch (const std::exception& e) {
    if (error) *error = std::string("bad spec: ") + e.what();
    return std::nullopt;
  }
}

VideoSequence load_frames_dir(const std::string& dir, std::vector<std::string>* basenames) {
  const std::vector<std::string> frames = sorted_pngs(dir);
  if (frames.size() < 2) throw IoError("need at least 2 frames in " + dir);
  VideoSequence video;
  for (const std::string& path : frames) {
    video.frames.push_back(load_png_rgb(path));
    if (basenames) basenames->push_back(fs::path(path).stem().string());
  }
  video.validate();
  return video;
}

std::vector<FlowPair> load_flow_dir(const std::string& dir,
                                    const std::vector<std::string>& basenames) {
  const int frame_count = static_cast<int>(basenames.size());
  std::vector<FlowPair> flows = make_flow_pairs(frame_count);
  for (int t = 1; t <= frame_count; ++t) {
    const std::string& base = basenames[static_cast<std::size_t>(t) - 1];
    if (t < frame_count) {
      const fs::path p = fs::path(dir) / (base + ".flo");
      if (!fs::exists(p)) throw IoError("missing flow file: " + p.string());
      flows[static_cast<std::size_t>(t)].forward = load_flo(p.string());
    }
    if (t > 1) {
      const fs::path p = fs::path(dir) / (base + ".rflo");
      if (!fs::exists(p)) throw IoError("missing flow file: " + p.string());
      flows[static_cast<std::size_t>(t)].backward = load_flo(p.string());
    }
  }
  return flows;
}

SequenceData load_sequence(const std::string& dir, bool require_gt) {
  const fs::path root(dir);
  SequenceData data;

  std::vector<std::string> basenames;
  data.video = load_frames_dir((root / "frames").string(), &basenames);
  const int frame_count = data.video.frame_count();
  data.flows = load_flow_dir((root / "flow").string(), basenames);
  data.mask = load_annotation_mask((root / "mask.png").string());

  const std::vector<std::string> gt = sorted_pngs(root / "gt");
  if (require_gt && gt.size() != static_cast<std::size_t>(frame_count)) {
    throw IoError("ground truth missing or incomplete in " + dir + "/gt");
  }
  for (const std::string& path : gt) data.gt.push_back(load_png_gray(path));
  return data;
}

EvalReport run_benchmark(const std::string& dataset_dir, const SegmentationConfig& config,
                         bool empty_union_is_one) {
  EvalReport report;
  if (!fs::is_directory(dataset_dir)) throw IoError("dataset directory not found: " + dataset_dir);

  std::vector<std::string> sequence_dirs;
  for (const auto& entry : fs::directory_iterator(dataset_dir)) {
    if (entry.is_directory()) sequence_dirs.push_back(entry.path().string());
  }
  std::sort(sequence_dirs.begin(), sequence_dirs.end());

  std::map<std::string, double> stage_ms;
  double mean_sum = 0.0;
  for (const std::string& dir : sequence_dirs) {
    SequenceReport sr;
    sr.name = fs::path(dir).filename().string();

    if (!fs::is_directory(fs::path(dir) / "gt") || sorted_pngs(fs::path(dir) / "gt").empty()) {
      sr.status = "skipped";
      sr.message = "no ground truth";
      std::cerr << "warning: skipping " << sr.name << " (no ground truth)\n";
      report.sequences.push_back(std::move(sr));
      continue;
    }

    try {
      const SequenceData data = load_sequence(dir, /*require_gt=*/true);
      const SegmentationResult result = segment_video(data.video, data.flows, data.mask, config);
      for (const StageTiming& t : result.diagnostics.timings) {
        stage_ms[t.stage] += t.milliseconds;
      }
      double sum = 0.0;
      for (int t = 1; t <= data.video.frame_count(); ++t) {
        const double score = iou(result.masks[static_cast<std::size_t>(t) - 1],
                                 data.gt[static_cast<std::size_t>(t) - 1], empty_union_is_one);
        sr.frame_iou.push_back(score);
        if (t >= 2) sum += score;
      }
      sr.mean_iou = sum / static_cast<double>(data.video.frame_count() - 1);
      mean_sum += sr.mean_iou;
      ++report.evaluated;
    } catch (const Error& e) {
      sr.status = "failed";
      sr.message = e.what();
    }
    report.sequences.push_back(std::move(sr));
  }

  report.dataset_mean = report.evaluated > 0 ? mean_sum / report.evaluated : 0.0;
  for (const auto& [stage, ms] : stage_ms) report.timings.push_back({stage, ms});
  return report;
}

std::string eval_report_to_json(const EvalReport& report, const SegmentationConfig& config) {
  nlohmann::json j;
  j["schema"] = report.schema;
  j["config"] = {
      {"spatial_grids", config.clustering.spatial_grids},
      {"refine_iterations", config.clustering.iterations},
      {"min_cluster_size", config.clustering.min_cluster_size},
      {"density_mode",
       config.clustering.density_mode == DensityMode::similarity ? "similarity" : "literal"},
      {"sentinel_distance", config.clustering.sentinel},
      {"delta_t", config.delta_t},
      {"nn_count", config.nn_count},
      {"superpixels", config.superpixel_count},
      {"gmm_components", config.gmm_components},
      {"propagation_iterations", config.propagation_iterations},
      {"threshold", config.threshold},
      {"seed_stride", config.tracking.seed_stride},
      {"appearance_rescale", config.tracking.appearance_rescale},
      {"reverse_track",
       config.reverse_track == ReverseTrackMode::printed ? "printed" : "extrapolated"},
  };
  j["sequences"] = nlohmann::json::array();
  for (const SequenceReport& sr : report.sequences) {
    nlohmann::json s;
    s["name"] = sr.name;
    s["status"] = sr.status;
    if (!sr.message.empty()) s["message"] = sr.message;
    if (sr.status == "ok") {
      s["frame_iou"] = sr.frame_iou;
      s["mean_iou"] = sr.mean_iou;
    }
    j["sequences"].push_back(std::move(s));
  }
  j["evaluated"] = report.evaluated;
  j["dataset_mean"] = report.dataset_mean;
  nlohmann::json timings = nlohmann::json::object();
  for (const StageTiming& t : report.timings) timings[t.stage] = t.milliseconds;
  j["wall_clock_ms"] = std::move(timings);
  return j.dump(2) + "\n";
}

std::string eval_report_table(const EvalReport& report) {
  std::ostringstream out;
  char line[128];
  out << "sequence                        status    mean IoU\n";
  for (const SequenceReport& sr : report.sequences) {
    if (sr.status == "ok") {
      std::snprintf(line, sizeof(line), "%-30s  %-8s  %.4f\n", sr.name.c_str(),
                    sr.status.c_str(), sr.mean_iou);
    } else {
      std::snprintf(line, sizeof(line), "%-30s  %-8s  -\n", sr.name.c_str(), sr.status.c_str());
    }
    out << line;
  }
  std::snprintf(line, sizeof(line), "Avg. (entire)                   %d seq     %.4f\n",
                report.evaluated, report.dataset_mean);
  out << line;
  return out.str();
}

}  // namespace supertraj
