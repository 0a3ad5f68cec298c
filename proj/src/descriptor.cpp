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

#include "supertraj/descriptor.hpp"

#include <algorithm>
#include <cmath>

#include "supertraj/colorspace.hpp"
#include "supertraj/errors.hpp"

namespace supertraj {

namespace {

constexpr float kPi = 3.14159265358979323846f;

int color_bin(float value, float lo, float hi) {
  const float t = std::clamp((value - lo) / (hi - lo), 0.0f, 1.0f);
  return std::min(kColorBins - 1, static_cast<int>(t * kColorBins));
}

float gray_at(const Image& frame, int x, int y) {
  x = std::clamp(x, 0, frame.width - 1);
  y = std::clamp(y, 0, frame.height - 1);
  const std::uint8_t* p = frame.px(x, y);
  return luminance(p[0], p[1], p[2]);
}

}  // namespace

std::vector<float> region_descriptor(const Region& region, const Image& frame) {
  if (region.pixels.empty()) throw ContractError("descriptor of an empty region");

  std::vector<float> desc(static_cast<std::size_t>(kDescriptorLength), 0.0f);
  float* rgb_hist = desc.data();
  float* lab_hist = desc.data() + 3 * kColorBins;
  float* hog = desc.data() + 6 * kColorBins;

  for (int p : region.pixels) {
    const int x = p % frame.width;
    const int y = p / frame.width;
    const std::uint8_t* px = frame.px(x, y);
    rgb_hist[0 * kColorBins + color_bin(px[0], 0.0f, 256.0f)] += 1.0f;
    rgb_hist[1 * kColorBins + color_bin(px[1], 0.0f, 256.0f)] += 1.0f;
    rgb_hist[2 * kColorBins + color_bin(px[2], 0.0f, 256.0f)] += 1.0f;
    const auto lab = rgb_to_lab(px[0], px[1], px[2]);
    lab_hist[0 * kColorBins + color_bin(lab[0], 0.0f, 100.0f)] += 1.0f;
    lab_hist[1 * kColorBins + color_bin(lab[1], -110.0f, 110.0f)] += 1.0f;
    lab_hist[2 * kColorBins + color_bin(lab[2], -110.0f, 110.0f)] += 1.0f;
  }
  const float inv_count = 1.0f / static_cast<float>(region.pixels.size());
  for (int i = 0; i < 6 * kColorBins; ++i) desc[static_cast<std::size_t>(i)] *= inv_count;

  // 15x15 patch at the centroid, shifted (not shrunk) to stay inside the
  // frame; gradients use central differences with clamped borders.
  const int patch = kHogCells * kHogCellSize;
  const int px0 = std::clamp(static_cast<int>(std::lround(region.cx)) - patch / 2, 0,
                             std::max(0, frame.width - patch));
  const int py0 = std::clamp(static_cast<int>(std::lround(region.cy)) - patch / 2, 0,
                             std::max(0, frame.height - patch));
  for (int dy = 0; dy < patch && dy < frame.height; ++dy) {
    for (int dx = 0; dx < patch && dx < frame.width; ++dx) {
      const int x = px0 + dx;
      const int y = py0 + dy;
      const float gx = gray_at(frame, x + 1, y) - gray_at(frame, x - 1, y);
      const float gy = gray_at(frame, x, y + 1) - gray_at(frame, x, y - 1);
      const float mag = std::hypot(gx, gy);
      if (mag == 0.0f) continue;
      float angle = std::atan2(gy, gx);
      if (angle < 0.0f) angle += kPi;
      if (angle >= kPi) angle -= kPi;
      const int bin = std::min(kHogOrientations - 1,
                               static_cast<int>(angle / kPi * kHogOrientations));
      const int cell = (dy / kHogCellSize) * kHogCells + (dx / kHogCellSize);
      hog[cell * kHogOrientations + bin] += mag;
    }
  }
  double hog_norm = 0.0;
  const int hog_len = kHogCells * kHogCells * kHogOrientations;
  for (int i = 0; i < hog_len; ++i) hog_norm += static_cast<double>(hog[i]) * hog[i];
  if (hog_norm > 1e-12) {
    const float inv = static_cast<float>(1.0 / std::sqrt(hog_norm));
    for (int i = 0; i < hog_len; ++i) hog[i] *= inv;
  }

  desc[static_cast<std::size_t>(kDescriptorLength) - 2] =
      frame.width > 1 ? region.cx / static_cast<float>(frame.width - 1) : 0.5f;
  desc[static_cast<std::size_t>(kDescriptorLength) - 1] =
      frame.height > 1 ? region.cy / static_cast<float>(frame.height - 1) : 0.5f;
  return desc;
}

double descriptor_distance(const std::vector<float>& a, const std::vector<float>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace supertraj
