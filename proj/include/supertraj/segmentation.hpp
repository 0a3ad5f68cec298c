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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "supertraj/clustering.hpp"
#include "supertraj/gmm.hpp"
#include "supertraj/image.hpp"
#include "supertraj/knn.hpp"
#include "supertraj/slic.hpp"
#include "supertraj/trajectory.hpp"

namespace supertraj {

// First-frame annotation: 1 = foreground.
struct AnnotationMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> fg;

  AnnotationMask() = default;
  AnnotationMask(int w, int h) : width(w), height(h) {
    fg.assign(static_cast<std::size_t>(w) * h, 0);
  }
  bool at(int x, int y) const { return fg[static_cast<std::size_t>(y) * width + x] != 0; }
};

// 8-bit grayscale PNG, 0 = background, 255 = foreground; other values are
// rejected.
AnnotationMask load_annotation_mask(const std::string& path);

enum class TrajLabel : std::uint8_t {
  foreground,  // starts at frame 1 on a foreground pixel
  background,  // starts at frame 1 on a background pixel
  outside,     // later starter whose virtual source lies outside the frame
  unlabeled,
};

struct TrajectoryLabeling {
  std::vector<TrajLabel> label;

  int count(TrajLabel l) const;
};

TrajectoryLabeling classify_trajectories(const TrajectorySet& trajs, const AnnotationMask& mask);

enum class ReverseTrackMode {
  printed,       // source = start - velocity (one mean step)
  extrapolated,  // source = start - (start_frame - 1) * velocity
};

// Moves unlabeled trajectories whose virtual source falls outside
// [0, w-1] x [0, h-1] into the `outside` category.
void reverse_track_sources(TrajectoryLabeling& labeling, const TrajectorySet& trajs,
                           const std::vector<TrajectoryFeatures>& features, int width, int height,
                           ReverseTrackMode mode);

// Foreground fraction among labeled members (outside counts as background
// evidence); nullopt when the cluster holds no labeled trajectory.
std::optional<double> supertraj_probability(const SuperTrajectory& st,
                                            const TrajectoryLabeling& labeling);

std::vector<std::optional<double>> supertraj_probabilities(const SuperTrajectorySet& sts,
                                                           const TrajectoryLabeling& labeling);

// Foreground/background mixtures over the RGB samples of all labeled
// super-trajectories' points, weighted by cluster foreground probability
// (outside-source trajectories contribute pure background samples).
AppearanceModel fit_appearance_model(const VideoSequence& video, const TrajectorySet& trajs,
                                     const SuperTrajectorySet& sts,
                                     const std::vector<std::optional<double>>& probabilities,
                                     const TrajectoryLabeling& labeling,
                                     const GmmFitOptions& options);

// Per-frame foreground probability maps. Pixels under a labeled
// super-trajectory point carry that cluster's probability and are marked in
// `clamp_value` (-1 elsewhere); every other pixel holds the model posterior
// (0.5 when no model is available).
struct PixelEstimates {
  std::vector<std::vector<float>> probability;  // [frame-1][y*w+x]
  std::vector<std::vector<float>> clamp_value;  // [frame-1][y*w+x], -1 = not clamped
};

PixelEstimates pixel_estimates(const VideoSequence& video, const TrajectorySet& trajs,
                               const SuperTrajectorySet& sts,
                               const std::vector<std::optional<double>>& probabilities,
                               const AppearanceModel* model, int workers);

// Sparse row-stochastic transition matrix over regions: self-loop weight 1,
// neighbor weights exp(-descriptor distance), rows normalized to sum 1.
struct TransitionMatrix {
  struct Entry {
    int col = 0;
    double value = 0.0;
  };
  std::vector<std::vector<Entry>> rows;
};

TransitionMatrix build_transition(const std::vector<std::vector<Neighbor>>& neighbors);

struct PropagationState {
  TransitionMatrix transition;
  std::vector<double> v;             // per-region foreground probability
  std::vector<std::uint8_t> clamped; // regions pinned to their initial value
};

// v <- P v, restoring clamped entries after every multiply.
std::vector<double> propagate(const PropagationState& state, int iterations, int workers);

// Region vote thresholded at `threshold` (strict), with labeled-trajectory
// pixels overridden by their clamped probability.
std::vector<GrayImage> finalize_masks(const std::vector<std::vector<Region>>& regions_by_frame,
                                      const std::vector<double>& v,
                                      const PixelEstimates& estimates, int width, int height,
                                      double threshold);

struct SegmentationConfig {
  TrackingConfig tracking;
  ClusteringConfig clustering;
  int delta_t = 3;
  int superpixel_count = 2000;
  int nn_count = 8;
  int gmm_components = 5;
  int propagation_iterations = 10;
  double threshold = 0.5;
  ReverseTrackMode reverse_track = ReverseTrackMode::printed;
  int workers = 1;
};

struct StageTiming {
  std::string stage;
  double milliseconds = 0.0;
};

struct SegmentationDiagnostics {
  int trajectory_count = 0;
  double mean_trajectory_length = 0.0;
  int foreground_trajectories = 0;
  int background_trajectories = 0;
  int outside_trajectories = 0;
  int unlabeled_trajectories = 0;
  int supertrajectory_count = 0;  // m
  int labeled_supertrajectory_count = 0;
  int region_count = 0;
  bool appearance_model_ok = false;
  std::vector<StageTiming> timings;
};

struct SegmentationResult {
  std::vector<GrayImage> masks;  // 0/255 per frame
  SegmentationDiagnostics diagnostics;
  // Populated only when dump_stages is requested: per-frame grayscale maps
  // of the labeled-cluster point estimates, the full pixel estimates, and
  // the propagated region probabilities.
  std::vector<GrayImage> stage_point_estimates;
  std::vector<GrayImage> stage_pixel_estimates;
  std::vector<GrayImage> stage_propagated;
};

SegmentationResult segment_video(const VideoSequence& video, const std::vector<FlowPair>& flows,
                                 const AnnotationMask& mask, const SegmentationConfig& config,
                                 bool dump_stages = false);

}  // namespace supertraj
