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

#include "supertraj/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "supertraj/errors.hpp"

namespace supertraj {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer for " + key + ", got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a number for " + key + ", got '" + value + "'");
  }
}

}  // namespace

SegmentationConfig default_config() {
  return SegmentationConfig{};
}

void apply_config_override(SegmentationConfig& config, const std::string& key,
                           const std::string& value) {
  if (key == "spatial_grids") {
    config.clustering.spatial_grids = parse_int(key, value);
  } else if (key == "refine_iterations") {
    config.clustering.iterations = parse_int(key, value);
  } else if (key == "min_cluster_size") {
    config.clustering.min_cluster_size = parse_int(key, value);
  } else if (key == "sentinel_distance") {
    config.clustering.sentinel = parse_double(key, value);
  } else if (key == "density_mode") {
    if (value == "similarity") {
      config.clustering.density_mode = DensityMode::similarity;
    } else if (value == "literal") {
      config.clustering.density_mode = DensityMode::literal;
    } else {
      throw ConfigError("density_mode must be 'similarity' or 'literal'");
    }
  } else if (key == "delta_t") {
    config.delta_t = parse_int(key, value);
  } else if (key == "nn_count") {
    config.nn_count = parse_int(key, value);
  } else if (key == "superpixels") {
    config.superpixel_count = parse_int(key, value);
  } else if (key == "gmm_components") {
    config.gmm_components = parse_int(key, value);
  } else if (key == "seed_stride") {
    config.tracking.seed_stride = parse_int(key, value);
  } else if (key == "appearance_rescale") {
    config.tracking.appearance_rescale = parse_double(key, value);
  } else if (key == "propagation_iterations") {
    config.propagation_iterations = parse_int(key, value);
  } else if (key == "threshold") {
    config.threshold = parse_double(key, value);
  } else if (key == "reverse_track") {
    if (value == "printed") {
      config.reverse_track = ReverseTrackMode::printed;
    } else if (value == "extrapolated") {
      config.reverse_track = ReverseTrackMode::extrapolated;
    } else {
      throw ConfigError("reverse_track must be 'printed' or 'extrapolated'");
    }
  } else if (key == "workers") {
    config.workers = parse_int(key, value);
  } else {
    throw ConfigError("unknown configuration key: " + key);
  }
}

void apply_config_file(SegmentationConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value' at " + path + ":" + std::to_string(line_no));
    }
    apply_config_override(config, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
}

void validate_config(const SegmentationConfig& config) {
  if (config.clustering.spatial_grids < 1) throw ConfigError("spatial_grids must be >= 1");
  if (config.clustering.iterations < 1) throw ConfigError("refine_iterations must be >= 1");
  if (config.clustering.min_cluster_size < 1) throw ConfigError("min_cluster_size must be >= 1");
  if (config.clustering.sentinel <= 0.0) throw ConfigError("sentinel_distance must be positive");
  if (config.delta_t < 1) throw ConfigError("delta_t must be >= 1");
  if (config.nn_count < 0) throw ConfigError("nn_count must be >= 0");
  if (config.superpixel_count < 1) throw ConfigError("superpixels must be >= 1");
  if (config.gmm_components < 1) throw ConfigError("gmm_components must be >= 1");
  if (config.tracking.seed_stride < 1) throw ConfigError("seed_stride must be >= 1");
  if (config.tracking.appearance_rescale < 0.0) {
    throw ConfigError("appearance_rescale must be >= 0");
  }
  if (config.propagation_iterations < 0) throw ConfigError("propagation_iterations must be >= 0");
  if (config.threshold <= 0.0 || config.threshold >= 1.0) {
    throw ConfigError("threshold must lie in (0, 1)");
  }
  if (config.workers < 0) throw ConfigError("workers must be >= 0");
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SUPERTRAJ_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
      // fall through to the hardware count
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return std::clamp(static_cast<int>(hw), 1, 16);
}

}  // namespace supertraj
