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

#include "supertraj/image.hpp"

namespace supertraj {

// Dense 2D motion field: one (dx, dy) vector per pixel, row-major, in
// pixels per frame. All components are finite.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<std::array<float, 2>> vectors;

  FlowField() = default;
  FlowField(int w, int h, std::array<float, 2> fill = {0.0f, 0.0f});

  bool empty() const { return width == 0 || height == 0; }
  std::array<float, 2> at(int x, int y) const {
    return vectors[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, std::array<float, 2> v) {
    vectors[static_cast<std::size_t>(y) * width + x] = v;
  }
};

// Motion fields anchored at one frame t: forward maps t -> t+1 and backward
// maps t -> t-1. The field that does not exist at a sequence end stays empty.
struct FlowPair {
  FlowField forward;
  FlowField backward;
};

// Ordered RGB frames of uniform dimensions. Frame indices are 1-based
// throughout, matching trajectory timestamps.
struct VideoSequence {
  std::vector<Image> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }
  const Image& frame(int t) const { return frames[static_cast<std::size_t>(t) - 1]; }

  void validate() const;  // throws ContractError on invariant violations
};

// Middlebury .flo container: little-endian float32 magic 202021.25,
// int32 width, int32 height, then width*height interleaved (dx, dy)
// float32 pairs in row-major order.
FlowField load_flo(const std::string& path);
void write_flo(const std::string& path, const FlowField& field);

// Bilinear interpolation of the four surrounding grid vectors. Exact at
// integer coordinates. Coordinates must lie in [0, width-1] x [0, height-1];
// callers clamp before sampling.
std::array<float, 2> sample_bilinear(const FlowField& field, float x, float y);

struct BlockMatchConfig {
  int block = 8;   // tile edge in pixels
  int radius = 4;  // max displacement searched per axis
};

// Test-grade block-matching flow: per tile, the integer displacement within
// +/-radius minimizing the mean absolute RGB difference, ties broken by
// smaller displacement magnitude, then smaller dy, then smaller dx. The tile
// result is expanded to every pixel of the tile.
FlowField estimate_flow_block(const Image& a, const Image& b, const BlockMatchConfig& cfg);

// Flow pairs indexed by frame: pairs[t] holds the fields anchored at frame t
// (slot 0 unused). pairs[T].forward and pairs[1].backward stay empty.
std::vector<FlowPair> make_flow_pairs(int frame_count);

}  // namespace supertraj
