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

namespace supertraj {

struct Neighbor {
  int id = -1;
  double distance = 0.0;
};

// Exact k nearest neighbors by Euclidean descriptor distance, searching only
// regions of frames 1..t(query) and excluding the query itself. Regions must
// be ordered by frame. Results are sorted by (distance, id); fewer than
// `count` candidates returns all of them. Partial-distance pruning keeps the
// scan exact.
std::vector<std::vector<Neighbor>> knn_backward(
    const std::vector<std::vector<float>>& descriptors, const std::vector<int>& frame_of,
    int count, int workers);

}  // namespace supertraj
