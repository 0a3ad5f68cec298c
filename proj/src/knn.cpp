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

#include "supertraj/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "supertraj/errors.hpp"
#include "supertraj/parallel.hpp"

namespace supertraj {

std::vector<std::vector<Neighbor>> knn_backward(
    const std::vector<std::vector<float>>& descriptors, const std::vector<int>& frame_of,
    int count, int workers) {
  const std::size_t n = descriptors.size();
  if (frame_of.size() != n) throw ContractError("descriptor/frame counts differ");
  for (std::size_t i = 1; i < n; ++i) {
    if (frame_of[i] < frame_of[i - 1]) {
      throw ContractError("regions must be ordered by frame");
    }
  }
  if (count < 0) throw ContractError("neighbor count must be >= 0");

  std::vector<std::vector<Neighbor>> result(n);
  if (count == 0) return result;

  // candidate_end[i]: one past the last region whose frame is <= frame_of[i].
  std::vector<std::size_t> candidate_end(n);
  {
    std::size_t end = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (end < n && frame_of[end] <= frame_of[i]) ++end;
      candidate_end[i] = end;
    }
  }

  parallel_for(n, workers, [&](std::size_t q) {
    const std::vector<float>& query = descriptors[q];
    const std::size_t dims = query.size();
    // Best-so-far list ordered by (distance^2, id), worst last.
    std::vector<std::pair<double, int>> best;
    best.reserve(static_cast<std::size_t>(count) + 1);

    for (std::size_t j = 0; j < candidate_end[q]; ++j) {
      if (j == q) continue;
      const float* other = descriptors[j].data();
      const double bound = best.size() == static_cast<std::size_t>(count)
                               ? best.back().first
                               : std::numeric_limits<double>::infinity();
      double d2 = 0.0;
      std::size_t d = 0;
      for (; d < dims; ++d) {
        const double diff = static_cast<double>(query[d]) - other[d];
        d2 += diff * diff;
        if (d2 > bound) break;
      }
      if (d < dims) continue;  // pruned
      const std::pair<double, int> entry{d2, static_cast<int>(j)};
      if (best.size() == static_cast<std::size_t>(count) && entry >= best.back()) continue;
      best.insert(std::upper_bound(best.begin(), best.end(), entry), entry);
      if (best.size() > static_cast<std::size_t>(count)) best.pop_back();
    }

    result[q].reserve(best.size());
    for (const auto& [d2, id] : best) {
      result[q].push_back(Neighbor{id, std::sqrt(d2)});
    }
  });
  return result;
}

}  // namespace supertraj
