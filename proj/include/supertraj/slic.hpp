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

#include <vector>

#include "supertraj/image.hpp"

namespace supertraj {

// Superpixel: a connected pixel set of one frame. Pixels are linear indices
// (y * width + x); ids are contiguous per frame in raster order of the
// region's first pixel.
struct Region {
  int id = -1;
  int frame = 1;
  std::vector<int> pixels;
  float cx = 0.0f;  // centroid
  float cy = 0.0f;
};

struct SlicConfig {
  int target_count = 2000;
  double compactness = 10.0;
  int iterations = 10;
};

// k-means over (L, a, b, x, y) with grid seeding at step sqrt(S/target),
// followed by connectivity enforcement that absorbs disconnected fragments
// into their largest settled neighbor. The regions partition the frame.
std::vector<Region> slic_regions(const Image& frame, const SlicConfig& cfg);

}  // namespace supertraj
