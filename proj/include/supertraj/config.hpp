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

#include "supertraj/segmentation.hpp"

namespace supertraj {

// Builds the pipeline configuration from an optional "key = value" file plus
// "key=value" command-line overrides. Keys:
//   spatial_grids (1200), refine_iterations (5), min_cluster_size (5),
//   delta_t (3), nn_count (8), superpixels (2000), gmm_components (5),
//   seed_stride (2), sentinel_distance (1e9), density_mode (similarity |
//   literal), propagation_iterations (10), threshold (0.5),
//   appearance_rescale (0.02), reverse_track (printed | extrapolated),
//   workers (0 = auto).
SegmentationConfig default_config();
void apply_config_file(SegmentationConfig& config, const std::string& path);
void apply_config_override(SegmentationConfig& config, const std::string& key,
                           const std::string& value);
void validate_config(const SegmentationConfig& config);

// Resolves workers == 0 through SUPERTRAJ_WORKERS, then the hardware count.
int resolve_workers(int requested);

}  // namespace supertraj
