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

#include <array>
#include <string>
#include <vector>

#include "supertraj/flow.hpp"
#include "supertraj/image.hpp"

namespace supertraj {

// Sub-pixel point at a 1-based frame index.
struct TrajPoint {
  float x = 0.0f;
  float y = 0.0f;
  int t = 1;
};

// Chain of points tracked across strictly consecutive frames.
struct Trajectory {
  int id = -1;
  std::vector<TrajPoint> points;

  int length() const { return static_cast<int>(points.size()); }
  int start_frame() const { return points.front().t; }
  int end_frame() const { return points.back().t; }
  bool overlaps(const Trajectory& other) const {
    return start_frame() <= other.end_frame() && other.start_frame() <= end_frame();
  }
};

struct TrajectorySet {
  std::vector<Trajectory> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  double mean_length() const;
};

// Per-trajectory descriptor: mean location, mean color (0-255 scale), mean
// velocity in pixels/frame, plus the frame span used for overlap tests.
struct TrajectoryFeatures {
  std::array<float, 2> location = {0.0f, 0.0f};
  std::array<float, 3> color = {0.0f, 0.0f, 0.0f};
  std::array<float, 2> velocity = {0.0f, 0.0f};
  int start_frame = 1;
  int end_frame = 1;

  bool overlaps(const TrajectoryFeatures& other) const {
    return start_frame <= other.end_frame && other.start_frame <= end_frame;
  }
};

struct TrackingConfig {
  int seed_stride = 2;
  // Appearance energy is an RGB distance in gray levels; it is multiplied by
  // this factor before entering the survival exponent so that appearance and
  // flow-consistency energies share a scale.
  double appearance_rescale = 1.0 / 50.0;
  int min_length = 4;
  int workers = 1;
};

// Euclidean RGB difference between the bilinearly sampled colors at two
// consecutive-frame positions (unscaled).
double appearance_energy(const Image& frame_prev, const Image& frame_cur,
                         const TrajPoint& p_prev, const TrajPoint& p_cur);

// |bwd + fwd| / (|bwd| + |fwd|), defined as 0 when both vectors are zero.
double occlusion_energy(std::array<float, 2> fwd, std::array<float, 2> bwd);

// exp(-(e_app + e_occ)); e_app is expected to be rescaled already.
double step_probability(double e_app, double e_occ);

// Follows the forward flow from `start` until the survival probability drops
// below 0.5, the next position leaves the frame, or the sequence ends. The
// returned chain contains only accepted points (probability still >= 0.5).
Trajectory track_point(const TrajPoint& start, const VideoSequence& video,
                       const std::vector<FlowPair>& flows, double appearance_rescale);

struct TrackingResult {
  TrajectorySet kept;                  // length >= min_length, ids re-numbered 0..n-1
  std::vector<Trajectory> discarded;   // shorter chains, kept for coverage audits
};

// Seeds trackers on a stride grid in frame 1 and, per subsequent frame, at
// grid cells not covered by any live trajectory. Seeds within one frame run
// in parallel; frames are sequential. Ids follow (frame, y, x) seed order.
TrackingResult generate_trajectories_full(const VideoSequence& video,
                                          const std::vector<FlowPair>& flows,
                                          const TrackingConfig& cfg);

TrajectorySet generate_trajectories(const VideoSequence& video,
                                    const std::vector<FlowPair>& flows,
                                    const TrackingConfig& cfg);

// Mean location/color over all points; velocity averaged over the finite
// differences (p[n+delta_t] - p[n]) / delta_t, falling back to the endpoint
// slope when the chain is not longer than delta_t.
TrajectoryFeatures trajectory_features(const Trajectory& traj, const VideoSequence& video,
                                       int delta_t = 3);

std::vector<TrajectoryFeatures> compute_all_features(const TrajectorySet& trajs,
                                                     const VideoSequence& video,
                                                     int delta_t, int workers);

// Line format: "id L t0" header followed by L lines "x y", coordinates
// printed with exactly 3 fractional digits.
void write_trajectories(const std::string& path, const TrajectorySet& trajs);
TrajectorySet read_trajectories(const std::string& path);

}  // namespace supertraj
