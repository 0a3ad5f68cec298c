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
#include "supertraj/slic.hpp"

namespace supertraj {

// Layout: RGB histograms (3 x 20), LAB histograms (3 x 20), HOG over a
// 15 x 15 patch at the region centroid (3 x 3 cells x 6 orientation bins),
// then the centroid normalized to [0, 1]. Each color-channel histogram sums
// to 1; the HOG block is L2-normalized (all zeros for a constant patch).
constexpr int kColorBins = 20;
constexpr int kHogCells = 3;          // per axis
constexpr int kHogCellSize = 5;       // pixels per axis
constexpr int kHogOrientations = 6;   // unsigned, over [0, pi)
constexpr int kDescriptorLength = 2 * 3 * kColorBins + kHogCells * kHogCells * kHogOrientations + 2;

std::vector<float> region_descriptor(const Region& region, const Image& frame);

double descriptor_distance(const std::vector<float>& a, const std::vector<float>& b);

}  // namespace supertraj
