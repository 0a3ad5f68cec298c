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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "supertraj/flow.hpp"
#include "supertraj/image.hpp"
#include "supertraj/segmentation.hpp"

namespace supertraj {

// |mask AND gt| / |mask OR gt| over nonzero pixels. Two empty masks score 1
// by default (flippable for the convention that scores them 0).
double iou(const GrayImage& mask, const GrayImage& gt, bool empty_union_is_one = true);

enum class ObjectShape { rectangle, disk };

// A moving synthetic object: position at frame k is start + (k-1) * velocity.
// Objects "enter" the frame simply by starting outside of it. Texture noise
// is anchored to object-local coordinates so tracked appearance is constant.
struct SyntheticObject {
  ObjectShape shape = ObjectShape::rectangle;
  double size_x = 30.0;  // rectangle edges, or disk diameter
  double size_y = 30.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  std::array<std::uint8_t, 3> color = {200, 60, 60};
  int noise = 0;  // max +/- per-channel texture amplitude
};

// Static vertical bar drawn over everything while active.
struct OccluderSpec {
  double x = 0.0;
  double width = 10.0;
  int first_frame = 1;
  int last_frame = 1;
  std::array<std::uint8_t, 3> color = {30, 30, 30};
  int noise = 0;
};

struct SyntheticSpec {
  int width = 160;
  int height = 120;
  int frame_count = 40;
  std::array<std::uint8_t, 3> background_color = {40, 90, 160};
  int background_noise = 0;  // anchored to frame coordinates
  SyntheticObject object;                   // the ground-truth target
  std::optional<SyntheticObject> intruder;  // distractor, ground truth background
  std::optional<OccluderSpec> occluder;
};

struct SyntheticSequence {
  VideoSequence video;
  std::vector<FlowPair> flows;          // exact motion, indexed by frame
  std::vector<GrayImage> gt;            // visible target pixels, 0/255
  std::vector<GrayImage> intruder_gt;   // visible intruder pixels (empty without one)
  AnnotationMask first_mask;
};

// Renders frames, ground truth and exact flow. Forward flow holds the object
// velocity at visible object pixels and zero elsewhere; backward flow is the
// inverse, so occlusion events break the forward/backward consistency.
SyntheticSequence generate_synthetic(const SyntheticSpec& spec);

// Writes frames/%05d.png, flow/%05d.flo + .rflo, mask.png and gt/%05d.png.
void write_synthetic_dataset(const std::string& dir, const SyntheticSequence& seq);

std::optional<SyntheticSpec> parse_synthetic_spec_json(const std::string& path,
                                                       std::string* error);

struct SequenceReport {
  std::string name;
  std::string status = "ok";  // ok | skipped | failed
  std::string message;
  std::vector<double> frame_iou;  // aligned with frames, frame 1 included
  double mean_iou = 0.0;          // over frames 2..T
};

struct EvalReport {
  int schema = 1;
  std::vector<SequenceReport> sequences;
  double dataset_mean = 0.0;  // mean of the per-sequence means, ok sequences only
  int evaluated = 0;
  std::vector<StageTiming> timings;  // summed over sequences
};

// Dataset layout: <dir>/<sequence>/{frames/, flow/, mask.png, gt/}.
// Sequences without gt are skipped with a warning; sequences whose flow is
// missing are reported as failed.
EvalReport run_benchmark(const std::string& dataset_dir, const SegmentationConfig& config,
                         bool empty_union_is_one = true);

// Frames are the lexicographically sorted *.png files of a directory.
VideoSequence load_frames_dir(const std::string& dir,
                              std::vector<std::string>* basenames = nullptr);

// Expects <basename>.flo for frames 1..T-1 and <basename>.rflo for frames
// 2..T; a missing file raises an IoError naming it.
std::vector<FlowPair> load_flow_dir(const std::string& dir,
                                    const std::vector<std::string>& basenames);

// Loads one sequence in the layout above (gt optional unless require_gt).
struct SequenceData {
  VideoSequence video;
  std::vector<FlowPair> flows;
  AnnotationMask mask;
  std::vector<GrayImage> gt;
};

SequenceData load_sequence(const std::string& dir, bool require_gt);

std::string eval_report_to_json(const EvalReport& report, const SegmentationConfig& config);
std::string eval_report_table(const EvalReport& report);

}  // namespace supertraj
