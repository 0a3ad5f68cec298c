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

#include "supertraj/slic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "supertraj/colorspace.hpp"
#include "supertraj/errors.hpp"

namespace supertraj {

namespace {

struct Center {
  float l = 0.0f, a = 0.0f, b = 0.0f, x = 0.0f, y = 0.0f;
};

}  // namespace

std::vector<Region> slic_regions(const Image& frame, const SlicConfig& cfg) {
  const int width = frame.width;
  const int height = frame.height;
  const int pixel_count = width * height;
  if (frame.empty()) throw ContractError("cannot segment an empty frame");
  if (cfg.target_count < 1 || cfg.target_count > pixel_count) {
    throw ConfigError("superpixel target out of range");
  }

  const double step = std::sqrt(static_cast<double>(pixel_count) / cfg.target_count);
  const int nx = std::max(1, static_cast<int>(width / step));
  const int ny = std::max(1, static_cast<int>(height / step));
  const double sx = static_cast<double>(width) / nx;
  const double sy = static_cast<double>(height) / ny;

  std::vector<std::array<float, 3>> lab_raw(static_cast<std::size_t>(pixel_count));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::uint8_t* p = frame.px(x, y);
      lab_raw[static_cast<std::size_t>(y) * width + x] = rgb_to_lab(p[0], p[1], p[2]);
    }
  }
  // 3x3 box smoothing keeps per-pixel texture noise from dominating the
  // color term; strong edges survive within a one-pixel band.
  std::vector<std::array<float, 3>> lab(static_cast<std::size_t>(pixel_count));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      float sum[3] = {0.0f, 0.0f, 0.0f};
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int qx = std::clamp(x + dx, 0, width - 1);
          const int qy = std::clamp(y + dy, 0, height - 1);
          const auto& v = lab_raw[static_cast<std::size_t>(qy) * width + qx];
          sum[0] += v[0];
          sum[1] += v[1];
          sum[2] += v[2];
        }
      }
      lab[static_cast<std::size_t>(y) * width + x] = {sum[0] / 9.0f, sum[1] / 9.0f,
                                                      sum[2] / 9.0f};
    }
  }

  // Seed colors from a 3x3 mean so single-pixel noise does not skew the
  // first assignment.
  std::vector<Center> centers(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Center& c = centers[static_cast<std::size_t>(j) * nx + i];
      c.x = static_cast<float>((i + 0.5) * sx);
      c.y = static_cast<float>((j + 0.5) * sy);
      const int px = std::min(width - 1, static_cast<int>(c.x));
      const int py = std::min(height - 1, static_cast<int>(c.y));
      float sum_l = 0.0f, sum_a = 0.0f, sum_b = 0.0f;
      int count = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int qx = std::clamp(px + dx, 0, width - 1);
          const int qy = std::clamp(py + dy, 0, height - 1);
          const auto& v = lab[static_cast<std::size_t>(qy) * width + qx];
          sum_l += v[0];
          sum_a += v[1];
          sum_b += v[2];
          ++count;
        }
      }
      c.l = sum_l / static_cast<float>(count);
      c.a = sum_a / static_cast<float>(count);
      c.b = sum_b / static_cast<float>(count);
    }
  }

  // Spatial distances are weighted by (compactness / step)^2 against squared
  // Lab distance, as in the standard SLIC metric.
  const double spatial_weight =
      (cfg.compactness / step) * (cfg.compactness / step);
  std::vector<int> label(static_cast<std::size_t>(pixel_count), 0);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    for (int y = 0; y < height; ++y) {
      const int cj = std::min(ny - 1, static_cast<int>(y / sy));
      for (int x = 0; x < width; ++x) {
        const int ci = std::min(nx - 1, static_cast<int>(x / sx));
        const auto& v = lab[static_cast<std::size_t>(y) * width + x];

        double best = std::numeric_limits<double>::infinity();
        int best_label = 0;
        for (int j = std::max(0, cj - 2); j <= std::min(ny - 1, cj + 2); ++j) {
          for (int i = std::max(0, ci - 2); i <= std::min(nx - 1, ci + 2); ++i) {
            const int idx = j * nx + i;
            const Center& c = centers[static_cast<std::size_t>(idx)];
            const double dl = v[0] - c.l;
            const double da = v[1] - c.a;
            const double db = v[2] - c.b;
            const double dx = x - c.x;
            const double dy = y - c.y;
            const double dist = dl * dl + da * da + db * db + spatial_weight * (dx * dx + dy * dy);
            if (dist < best) {
              best = dist;
              best_label = idx;
            }
          }
        }
        label[static_cast<std::size_t>(y) * width + x] = best_label;
      }
    }

    std::vector<double> sum(centers.size() * 5, 0.0);
    std::vector<int> count(centers.size(), 0);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * width + x;
        const std::size_t k = static_cast<std::size_t>(label[p]);
        const auto& v = lab[p];
        sum[k * 5 + 0] += v[0];
        sum[k * 5 + 1] += v[1];
        sum[k * 5 + 2] += v[2];
        sum[k * 5 + 3] += x;
        sum[k * 5 + 4] += y;
        ++count[k];
      }
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (count[k] == 0) continue;  // empty cluster keeps its previous center
      Center& c = centers[k];
      c.l = static_cast<float>(sum[k * 5 + 0] / count[k]);
      c.a = static_cast<float>(sum[k * 5 + 1] / count[k]);
      c.b = static_cast<float>(sum[k * 5 + 2] / count[k]);
      c.x = static_cast<float>(sum[k * 5 + 3] / count[k]);
      c.y = static_cast<float>(sum[k * 5 + 4] / count[k]);
    }
  }

  // Connectivity: find 4-connected components per label; each label keeps
  // its largest component, every other fragment is absorbed into the
  // adjacent settled region with the largest area.
  std::vector<int> component(static_cast<std::size_t>(pixel_count), -1);
  std::vector<std::vector<int>> comp_pixels;
  std::vector<int> comp_label;
  for (int start = 0; start < pixel_count; ++start) {
    if (component[static_cast<std::size_t>(start)] >= 0) continue;
    const int comp_id = static_cast<int>(comp_pixels.size());
    const int this_label = label[static_cast<std::size_t>(start)];
    comp_label.push_back(this_label);
    comp_pixels.emplace_back();
    std::queue<int> queue;
    queue.push(start);
    component[static_cast<std::size_t>(start)] = comp_id;
    while (!queue.empty()) {
      const int p = queue.front();
      queue.pop();
      comp_pixels.back().push_back(p);
      const int x = p % width;
      const int y = p / width;
      const int neighbors[4] = {x > 0 ? p - 1 : -1, x + 1 < width ? p + 1 : -1,
                                y > 0 ? p - width : -1, y + 1 < height ? p + width : -1};
      for (int q : neighbors) {
        if (q < 0 || component[static_cast<std::size_t>(q)] >= 0 ||
            label[static_cast<std::size_t>(q)] != this_label) {
          continue;
        }
        component[static_cast<std::size_t>(q)] = comp_id;
        queue.push(q);
      }
    }
  }

  const int comp_count = static_cast<int>(comp_pixels.size());
  std::vector<int> keeper_of_label;  // label -> component id of its largest piece
  {
    std::map<int, int> best;
    for (int c = 0; c < comp_count; ++c) {
      auto it = best.find(comp_label[static_cast<std::size_t>(c)]);
      if (it == best.end() ||
          comp_pixels[static_cast<std::size_t>(c)].size() >
              comp_pixels[static_cast<std::size_t>(it->second)].size()) {
        best[comp_label[static_cast<std::size_t>(c)]] = c;
      }
    }
    keeper_of_label.assign(centers.size(), -1);
    for (const auto& [lbl, c] : best) keeper_of_label[static_cast<std::size_t>(lbl)] = c;
  }

  // region_of[p]: the settled region (indexed by keeper component) a pixel
  // finally belongs to; orphans settle in waves. Keeper areas are frozen at
  // their component size so absorption cannot snowball one region.
  std::vector<int> region_of(static_cast<std::size_t>(pixel_count), -1);
  std::vector<std::size_t> region_area(static_cast<std::size_t>(comp_count), 0);
  std::vector<char> settled(static_cast<std::size_t>(comp_count), 0);
  for (int c = 0; c < comp_count; ++c) {
    if (keeper_of_label[static_cast<std::size_t>(comp_label[static_cast<std::size_t>(c)])] == c) {
      settled[static_cast<std::size_t>(c)] = 1;
      region_area[static_cast<std::size_t>(c)] = comp_pixels[static_cast<std::size_t>(c)].size();
      for (int p : comp_pixels[static_cast<std::size_t>(c)]) {
        region_of[static_cast<std::size_t>(p)] = c;
      }
    }
  }

  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (int c = 0; c < comp_count; ++c) {
      if (settled[static_cast<std::size_t>(c)]) continue;
      // Adjacent settled region with the largest frozen area (ties: lower id).
      int target = -1;
      for (int p : comp_pixels[static_cast<std::size_t>(c)]) {
        const int x = p % width;
        const int y = p / width;
        const int neighbors[4] = {x > 0 ? p - 1 : -1, x + 1 < width ? p + 1 : -1,
                                  y > 0 ? p - width : -1, y + 1 < height ? p + width : -1};
        for (int q : neighbors) {
          if (q < 0) continue;
          const int r = region_of[static_cast<std::size_t>(q)];
          if (r < 0 || r == target) continue;
          if (target < 0 || region_area[static_cast<std::size_t>(r)] > region_area[static_cast<std::size_t>(target)] ||
              (region_area[static_cast<std::size_t>(r)] == region_area[static_cast<std::size_t>(target)] && r < target)) {
            target = r;
          }
        }
      }
      if (target < 0) continue;  // only orphan neighbors so far; next wave
      for (int p : comp_pixels[static_cast<std::size_t>(c)]) {
        region_of[static_cast<std::size_t>(p)] = target;
      }
      settled[static_cast<std::size_t>(c)] = 1;
      progressed = true;
    }
  }

  // Compact ids in raster order of first appearance.
  std::vector<int> new_id(static_cast<std::size_t>(comp_count), -1);
  std::vector<Region> regions;
  for (int p = 0; p < pixel_count; ++p) {
    const int r = region_of[static_cast<std::size_t>(p)];
    if (new_id[static_cast<std::size_t>(r)] < 0) {
      new_id[static_cast<std::size_t>(r)] = static_cast<int>(regions.size());
      regions.emplace_back();
      regions.back().id = new_id[static_cast<std::size_t>(r)];
    }
    regions[static_cast<std::size_t>(new_id[static_cast<std::size_t>(r)])].pixels.push_back(p);
  }
  for (Region& region : regions) {
    double cx = 0.0, cy = 0.0;
    for (int p : region.pixels) {
      cx += p % width;
      cy += p / width;
    }
    region.cx = static_cast<float>(cx / static_cast<double>(region.pixels.size()));
    region.cy = static_cast<float>(cy / static_cast<double>(region.pixels.size()));
  }
  return regions;
}

}  // namespace supertraj
