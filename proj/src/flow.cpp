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

#include "supertraj/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>

#include "supertraj/errors.hpp"

namespace supertraj {

namespace {

constexpr float kFloMagic = 202021.25f;
constexpr std::int32_t kMaxFloDim = 99999;

}  // namespace

FlowField::FlowField(int w, int h, std::array<float, 2> fill) : width(w), height(h) {
  vectors.assign(static_cast<std::size_t>(w) * h, fill);
}

void VideoSequence::validate() const {
  if (frame_count() < 2) throw ContractError("video must have at least 2 frames");
  for (const Image& f : frames) {
    if (f.width != width() || f.height != height()) {
      throw ContractError("video frames must share dimensions");
    }
  }
}

FlowField load_flo(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open flow file: " + path);

  float magic = 0.0f;
  if (!in.read(reinterpret_cast<char*>(&magic), sizeof(magic))) {
    throw IoError("truncated flow file: " + path);
  }
  if (magic != kFloMagic) {
    throw FormatError("bad magic number in flow file: " + path);
  }

  std::int32_t width = 0;
  std::int32_t height = 0;
  if (!in.read(reinterpret_cast<char*>(&width), sizeof(width)) ||
      !in.read(reinterpret_cast<char*>(&height), sizeof(height))) {
    throw IoError("truncated flow file: " + path);
  }
  if (width <= 0 || height <= 0 || width > kMaxFloDim || height > kMaxFloDim) {
    throw FormatError("invalid flow dimensions in: " + path);
  }

  FlowField field(width, height);
  const std::size_t floats = static_cast<std::size_t>(width) * height * 2;
  if (!in.read(reinterpret_cast<char*>(field.vectors.data()),
               static_cast<std::streamsize>(floats * sizeof(float)))) {
    throw IoError("truncated flow payload in: " + path);
  }
  for (const auto& v : field.vectors) {
    if (!std::isfinite(v[0]) || !std::isfinite(v[1])) {
      throw FormatError("non-finite flow value in: " + path);
    }
  }
  return field;
}

void write_flo(const std::string& path, const FlowField& field) {
  if (field.empty()) throw ContractError("cannot write empty flow field");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write flow file: " + path);

  const float magic = kFloMagic;
  const std::int32_t width = field.width;
  const std::int32_t height = field.height;
  out.write(reinterpret_cast<const char*>(&magic), sizeof(magic));
  out.write(reinterpret_cast<const char*>(&width), sizeof(width));
  out.write(reinterpret_cast<const char*>(&height), sizeof(height));
  out.write(reinterpret_cast<const char*>(field.vectors.data()),
            static_cast<std::streamsize>(field.vectors.size() * sizeof(float) * 2));
  if (!out) throw IoError("failed writing flow file: " + path);
}

std::array<float, 2> sample_bilinear(const FlowField& field, float x, float y) {
  if (x < 0.0f || y < 0.0f || x > static_cast<float>(field.width - 1) ||
      y > static_cast<float>(field.height - 1)) {
    throw ContractError("flow sample out of range");
  }
  const int x0 = std::min(static_cast<int>(x), field.width - 1);
  const int y0 = std::min(static_cast<int>(y), field.height - 1);
  const int x1 = std::min(x0 + 1, field.width - 1);
  const int y1 = std::min(y0 + 1, field.height - 1);
  const float fx = x - static_cast<float>(x0);
  const float fy = y - static_cast<float>(y0);

  const auto v00 = field.at(x0, y0);
  const auto v10 = field.at(x1, y0);
  const auto v01 = field.at(x0, y1);
  const auto v11 = field.at(x1, y1);

  std::array<float, 2> out;
  for (int c = 0; c < 2; ++c) {
    const float top = v00[c] + fx * (v10[c] - v00[c]);
    const float bot = v01[c] + fx * (v11[c] - v01[c]);
    out[static_cast<std::size_t>(c)] = top + fy * (bot - top);
  }
  return out;
}

FlowField estimate_flow_block(const Image& a, const Image& b, const BlockMatchConfig& cfg) {
  if (a.width != b.width || a.height != b.height) {
    throw ContractError("block matching requires equal image dimensions");
  }
  if (cfg.block <= 0 || cfg.radius < 0) {
    throw ConfigError("block size must be positive and radius non-negative");
  }
  if (cfg.block > a.width || cfg.block > a.height) {
    throw ConfigError("block size exceeds image dimensions");
  }

  FlowField field(a.width, a.height);
  for (int by = 0; by < a.height; by += cfg.block) {
    for (int bx = 0; bx < a.width; bx += cfg.block) {
      const int x_end = std::min(bx + cfg.block, a.width);
      const int y_end = std::min(by + cfg.block, a.height);

      double best_cost = std::numeric_limits<double>::infinity();
      long best_mag2 = 0;
      int best_dx = 0;
      int best_dy = 0;
      for (int dy = -cfg.radius; dy <= cfg.radius; ++dy) {
        for (int dx = -cfg.radius; dx <= cfg.radius; ++dx) {
          long sad = 0;
          long count = 0;
          for (int y = by; y < y_end; ++y) {
            const int ty = y + dy;
            if (ty < 0 || ty >= a.height) continue;
            for (int x = bx; x < x_end; ++x) {
              const int tx = x + dx;
              if (tx < 0 || tx >= a.width) continue;
              const std::uint8_t* pa = a.px(x, y);
              const std::uint8_t* pb = b.px(tx, ty);
              sad += std::abs(static_cast<int>(pa[0]) - pb[0]) +
                     std::abs(static_cast<int>(pa[1]) - pb[1]) +
                     std::abs(static_cast<int>(pa[2]) - pb[2]);
              ++count;
            }
          }
          if (count == 0) continue;
          const double cost = static_cast<double>(sad) / static_cast<double>(count);
          const long mag2 = static_cast<long>(dx) * dx + static_cast<long>(dy) * dy;
          const bool better =
              cost < best_cost ||
              (cost == best_cost &&
               (mag2 < best_mag2 ||
                (mag2 == best_mag2 &&
                 (dy < best_dy || (dy == best_dy && dx < best_dx)))));
          if (better) {
            best_cost = cost;
            best_mag2 = mag2;
            best_dx = dx;
            best_dy = dy;
          }
        }
      }

      const std::array<float, 2> v = {static_cast<float>(best_dx),
                                      static_cast<float>(best_dy)};
      for (int y = by; y < y_end; ++y) {
        for (int x = bx; x < x_end; ++x) field.set(x, y, v);
      }
    }
  }
  return field;
}

std::vector<FlowPair> make_flow_pairs(int frame_count) {
  return std::vector<FlowPair>(static_cast<std::size_t>(frame_count) + 1);
}

}  // namespace supertraj
