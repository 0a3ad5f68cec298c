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

#include "supertraj/dpc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "supertraj/errors.hpp"

namespace supertraj {

DistanceMatrix::DistanceMatrix(int count, double sentinel_value)
    : n(count), sentinel(sentinel_value) {
  d.assign(static_cast<std::size_t>(count) * count, 0.0);
}

std::vector<double> local_density(const DistanceMatrix& d, DensityMode mode) {
  std::vector<double> rho(static_cast<std::size_t>(d.n), 0.0);
  for (int i = 0; i < d.n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < d.n; ++j) {
      if (j == i) continue;
      const double dist = d.at(i, j);
      if (mode == DensityMode::literal) {
        sum += dist;
      } else if (dist < d.sentinel) {
        sum += std::exp(-dist);
      }
    }
    rho[static_cast<std::size_t>(i)] = sum;
  }
  return rho;
}

std::vector<double> delta_distance(const DistanceMatrix& d, const std::vector<double>& rho) {
  std::vector<double> delta(static_cast<std::size_t>(d.n), 0.0);
  if (d.n == 0) return delta;

  int densest = 0;
  for (int i = 1; i < d.n; ++i) {
    if (rho[static_cast<std::size_t>(i)] > rho[static_cast<std::size_t>(densest)]) densest = i;
  }

  for (int i = 0; i < d.n; ++i) {
    if (i == densest) {
      double max_dist = 0.0;
      for (int j = 0; j < d.n; ++j) max_dist = std::max(max_dist, d.at(i, j));
      delta[static_cast<std::size_t>(i)] = max_dist;
      continue;
    }
    double min_dist = d.sentinel;
    for (int j = 0; j < d.n; ++j) {
      if (rho[static_cast<std::size_t>(j)] > rho[static_cast<std::size_t>(i)]) {
        min_dist = std::min(min_dist, d.at(i, j));
      }
    }
    delta[static_cast<std::size_t>(i)] = min_dist;
  }
  return delta;
}

DpcScores dpc_scores(const DistanceMatrix& d, DensityMode mode) {
  DpcScores s;
  s.rho = local_density(d, mode);
  s.delta = delta_distance(d, s.rho);
  s.gamma.resize(static_cast<std::size_t>(d.n));
  for (int i = 0; i < d.n; ++i) {
    s.gamma[static_cast<std::size_t>(i)] =
        s.rho[static_cast<std::size_t>(i)] * s.delta[static_cast<std::size_t>(i)];
  }
  return s;
}

std::vector<int> select_centers(const DistanceMatrix& d, int count, DensityMode mode) {
  if (count < 1) throw ContractError("center count must be >= 1");
  if (d.n == 0) throw ContractError("cannot select centers from an empty matrix");

  const DpcScores s = dpc_scores(d, mode);
  auto ranks_before = [&](int a, int b) {
    const std::size_t ia = static_cast<std::size_t>(a);
    const std::size_t ib = static_cast<std::size_t>(b);
    if (s.gamma[ia] != s.gamma[ib]) return s.gamma[ia] > s.gamma[ib];
    if (s.rho[ia] != s.rho[ib]) return s.rho[ia] > s.rho[ib];
    return a < b;
  };

  std::vector<int> isolated;
  for (int i = 0; i < d.n; ++i) {
    if (s.delta[static_cast<std::size_t>(i)] == d.sentinel) isolated.push_back(i);
  }
  if (static_cast<int>(isolated.size()) > count) {
    std::sort(isolated.begin(), isolated.end(), ranks_before);
    return isolated;
  }

  std::vector<int> order(static_cast<std::size_t>(d.n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), ranks_before);
  order.resize(static_cast<std::size_t>(std::min(count, d.n)));
  return order;
}

ClusterAssignment assign_members(const DistanceMatrix& d, const std::vector<double>& rho,
                                 const std::vector<int>& centers) {
  if (centers.empty()) throw ContractError("assign_members requires at least one center");

  ClusterAssignment out;
  out.centers = centers;
  out.label.assign(static_cast<std::size_t>(d.n), -1);

  std::vector<char> is_center(static_cast<std::size_t>(d.n), 0);
  for (int c : centers) is_center[static_cast<std::size_t>(c)] = 1;

  std::vector<int> order(static_cast<std::size_t>(d.n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (rho[static_cast<std::size_t>(a)] != rho[static_cast<std::size_t>(b)]) {
      return rho[static_cast<std::size_t>(a)] > rho[static_cast<std::size_t>(b)];
    }
    return a < b;
  });

  for (int i : order) {
    if (is_center[static_cast<std::size_t>(i)]) {
      out.label[static_cast<std::size_t>(i)] = i;
      continue;
    }
    // Nearest strictly denser item within sentinel reach; processed earlier
    // by construction, so its label is final.
    int parent = -1;
    double parent_dist = d.sentinel;
    for (int j = 0; j < d.n; ++j) {
      if (rho[static_cast<std::size_t>(j)] <= rho[static_cast<std::size_t>(i)]) continue;
      const double dist = d.at(i, j);
      if (dist < parent_dist) {
        parent_dist = dist;
        parent = j;
      }
    }
    if (parent >= 0) {
      out.label[static_cast<std::size_t>(i)] = out.label[static_cast<std::size_t>(parent)];
      continue;
    }
    int best_center = centers.front();
    double best_dist = d.at(i, best_center);
    for (int c : centers) {
      const double dist = d.at(i, c);
      if (dist < best_dist || (dist == best_dist && c < best_center)) {
        best_dist = dist;
        best_center = c;
      }
    }
    out.label[static_cast<std::size_t>(i)] = best_center;
  }
  return out;
}

}  // namespace supertraj
