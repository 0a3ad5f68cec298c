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

// Symmetric pairwise distances with a sentinel value for pairs that have no
// temporal overlap. The sentinel strictly exceeds every finite entry.
struct DistanceMatrix {
  int n = 0;
  double sentinel = 1e9;
  std::vector<double> d;

  DistanceMatrix() = default;
  DistanceMatrix(int count, double sentinel_value);

  double at(int i, int j) const {
    return d[static_cast<std::size_t>(i) * n + j];
  }
  void set(int i, int j, double value) {
    d[static_cast<std::size_t>(i) * n + j] = value;
    d[static_cast<std::size_t>(j) * n + i] = value;
  }
};

// How local density is accumulated from a distance row. `literal` sums raw
// distances, which ranks far-from-everything items highest; `similarity`
// (the default) sums exp(-d) over finite entries so that dense neighborhoods
// rank highest, consistent with centers having locally maximal density.
enum class DensityMode {
  similarity,
  literal,
};

struct DpcScores {
  std::vector<double> rho;
  std::vector<double> delta;
  std::vector<double> gamma;  // rho * delta
};

std::vector<double> local_density(const DistanceMatrix& d, DensityMode mode);

// delta_i = min distance to any strictly denser item; the globally densest
// item (lowest index on ties) takes its row maximum instead. Items whose
// denser alternatives are all at the sentinel keep delta = sentinel.
std::vector<double> delta_distance(const DistanceMatrix& d, const std::vector<double>& rho);

DpcScores dpc_scores(const DistanceMatrix& d, DensityMode mode);

// Returns the cluster centers, ordered by decreasing gamma (ties: higher
// rho, then lower index). When more than `count` items sit at delta ==
// sentinel, all of those isolated-group centers are returned instead.
std::vector<int> select_centers(const DistanceMatrix& d, int count, DensityMode mode);

struct ClusterAssignment {
  std::vector<int> centers;
  std::vector<int> label;  // per item: the item index of its center
};

// Density-ordered inheritance: every non-center takes the label of its
// nearest strictly denser reachable item; items with no reachable denser
// neighbor fall back to the nearest center by raw distance.
ClusterAssignment assign_members(const DistanceMatrix& d, const std::vector<double>& rho,
                                 const std::vector<int>& centers);

}  // namespace supertraj
