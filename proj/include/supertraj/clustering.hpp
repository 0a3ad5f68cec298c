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

#include <string>
#include <vector>

#include "supertraj/dpc.hpp"
#include "supertraj/image.hpp"
#include "supertraj/trajectory.hpp"

namespace supertraj {

struct ClusteringConfig {
  int spatial_grids = 1200;  // K: number of R x R seed volumes
  int iterations = 5;
  int min_cluster_size = 5;
  double sentinel = 1e9;  // H
  DensityMode density_mode = DensityMode::similarity;
  int workers = 1;
};

// Normalizers that put the three feature distances on comparable scales.
struct NormalizationContext {
  double max_intensity = 255.0;
  double sampling_step = 1.0;  // R = sqrt(width * height / K)
  double mean_motion = 1.0;    // mean |velocity| over all trajectories, floored at 1 when zero
};

NormalizationContext make_normalization_context(int width, int height, int spatial_grids,
                                                const std::vector<TrajectoryFeatures>& features);

// Location, color and velocity differences, each normalized, summed; pairs
// without temporal overlap sit at the sentinel.
double trajectory_distance(const TrajectoryFeatures& a, const TrajectoryFeatures& b,
                           const NormalizationContext& ctx, double sentinel);

struct GridPartition {
  double step = 1.0;
  int cols = 1;
  int rows = 1;
  std::vector<std::vector<int>> groups;  // trajectory indices per cell, possibly empty
};

// Buckets each trajectory into the R x R cell containing its first point;
// the last row/column absorb the remainder.
GridPartition grid_partition(const TrajectorySet& trajs, int spatial_grids, int width,
                             int height);

// C = max(1, round(T / mean_length)) centers per group, selected by DPC on
// the group's pairwise distances. Returns global trajectory indices.
std::vector<int> initial_centers(const std::vector<int>& group,
                                 const std::vector<TrajectoryFeatures>& features, int frame_count,
                                 double mean_length, const NormalizationContext& ctx,
                                 const ClusteringConfig& cfg);

struct SuperTrajectory {
  int id = -1;
  int center = -1;           // trajectory index of the cluster center
  std::vector<int> members;  // trajectory indices, ascending
  std::array<float, 2> mean_location = {0.0f, 0.0f};
  std::array<float, 3> mean_color = {0.0f, 0.0f, 0.0f};
  std::array<float, 2> mean_velocity = {0.0f, 0.0f};
  int start_frame = 1;
  int end_frame = 1;
};

struct SuperTrajectorySet {
  std::vector<SuperTrajectory> items;

  std::size_t size() const { return items.size(); }
};

// Iterative windowed assignment and center update. Every trajectory is
// assigned each round to the in-window center (2R x 2R around the center's
// mean location) at minimum feature distance; trajectories matching no
// window go to the globally nearest center. After the final round, clusters
// below min_cluster_size dissolve into their members' nearest survivors.
SuperTrajectorySet refine(const TrajectorySet& trajs,
                          const std::vector<TrajectoryFeatures>& features,
                          std::vector<int> centers, const NormalizationContext& ctx,
                          const ClusteringConfig& cfg);

SuperTrajectorySet generate_supertrajectories(const TrajectorySet& trajs,
                                              const std::vector<TrajectoryFeatures>& features,
                                              int width, int height, int frame_count,
                                              const ClusteringConfig& cfg);

// Line format per cluster: "supertraj id center_id n" then one line with the
// n member trajectory ids.
void write_supertrajectories(const std::string& path, const SuperTrajectorySet& sts,
                             const TrajectorySet& trajs);
// Returns clusters with members resolved back to positions in `trajs`.
SuperTrajectorySet read_supertrajectories(const std::string& path, const TrajectorySet& trajs);

// Paints each trajectory point visible in frame t with its cluster mean
// color (stride x stride blocks); pixels without a trajectory stay black.
Image render_supertrajectory_frame(const TrajectorySet& trajs, const SuperTrajectorySet& sts,
                                   int frame, int width, int height, int stride);

}  // namespace supertraj
