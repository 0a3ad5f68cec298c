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

// Brute-force density-peaks reference, kept deliberately naive and separate
// from the library implementation. Used by the unit tests and the acceptance
// suite as the independent route.

#include <algorithm>
#include <random>
#include <vector>

#include "supertraj/dpc.hpp"
#include "test_util.hpp"

namespace supertraj::test {

inline std::vector<double> reference_rho(const DistanceMatrix& d, DensityMode mode) {
  std::vector<double> rho(static_cast<std::size_t>(d.n), 0.0);
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) {
      if (i == j) continue;
      if (mode == DensityMode::literal) {
        rho[static_cast<std::size_t>(i)] += d.at(i, j);
      } else if (d.at(i, j) != d.sentinel) {
        rho[static_cast<std::size_t>(i)] += std::exp(-d.at(i, j));
      }
    }
  }
  return rho;
}

inline std::vector<double> reference_delta(const DistanceMatrix& d,
                                           const std::vector<double>& rho) {
  std::vector<double> delta(static_cast<std::size_t>(d.n), 0.0);
  int densest = 0;
  for (int i = 0; i < d.n; ++i) {
    if (rho[static_cast<std::size_t>(i)] > rho[static_cast<std::size_t>(densest)]) densest = i;
  }
  for (int i = 0; i < d.n; ++i) {
    if (i == densest) {
      double mx = 0.0;
      for (int j = 0; j < d.n; ++j) mx = std::max(mx, d.at(i, j));
      delta[static_cast<std::size_t>(i)] = mx;
    } else {
      double mn = d.sentinel;
      for (int j = 0; j < d.n; ++j) {
        if (rho[static_cast<std::size_t>(j)] > rho[static_cast<std::size_t>(i)] && d.at(i, j) < mn) {
          mn = d.at(i, j);
        }
      }
      delta[static_cast<std::size_t>(i)] = mn;
    }
  }
  return delta;
}

inline std::vector<int> reference_select_centers(const DistanceMatrix& d, int count,
                                                 DensityMode mode) {
  const std::vector<double> rho = reference_rho(d, mode);
  const std::vector<double> delta = reference_delta(d, rho);
  std::vector<double> gamma(static_cast<std::size_t>(d.n));
  for (int i = 0; i < d.n; ++i) {
    gamma[static_cast<std::size_t>(i)] =
        rho[static_cast<std::size_t>(i)] * delta[static_cast<std::size_t>(i)];
  }
  auto before = [&](int a, int b) {
    if (gamma[static_cast<std::size_t>(a)] != gamma[static_cast<std::size_t>(b)]) {
      return gamma[static_cast<std::size_t>(a)] > gamma[static_cast<std::size_t>(b)];
    }
    if (rho[static_cast<std::size_t>(a)] != rho[static_cast<std::size_t>(b)]) {
      return rho[static_cast<std::size_t>(a)] > rho[static_cast<std::size_t>(b)];
    }
    return a < b;
  };

  std::vector<int> isolated;
  for (int i = 0; i < d.n; ++i) {
    if (delta[static_cast<std::size_t>(i)] == d.sentinel) isolated.push_back(i);
  }
  if (static_cast<int>(isolated.size()) > count) {
    std::sort(isolated.begin(), isolated.end(), before);
    return isolated;
  }
  std::vector<int> all;
  for (int i = 0; i < d.n; ++i) all.push_back(i);
  std::sort(all.begin(), all.end(), before);
  all.resize(static_cast<std::size_t>(std::min(count, d.n)));
  return all;
}

inline std::vector<int> reference_assign(const DistanceMatrix& d, const std::vector<double>& rho,
                                         const std::vector<int>& centers) {
  std::vector<int> order;
  for (int i = 0; i < d.n; ++i) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (rho[static_cast<std::size_t>(a)] != rho[static_cast<std::size_t>(b)]) {
      return rho[static_cast<std::size_t>(a)] > rho[static_cast<std::size_t>(b)];
    }
    return a < b;
  });

  std::vector<int> label(static_cast<std::size_t>(d.n), -1);
  for (int i : order) {
    if (std::find(centers.begin(), centers.end(), i) != centers.end()) {
      label[static_cast<std::size_t>(i)] = i;
      continue;
    }
    int parent = -1;
    double best = d.sentinel;
    for (int j = 0; j < d.n; ++j) {
      if (rho[static_cast<std::size_t>(j)] > rho[static_cast<std::size_t>(i)] && d.at(i, j) < best) {
        best = d.at(i, j);
        parent = j;
      }
    }
    if (parent >= 0) {
      label[static_cast<std::size_t>(i)] = label[static_cast<std::size_t>(parent)];
    } else {
      int best_center = centers.front();
      double best_dist = d.at(i, centers.front());
      for (int c : centers) {
        if (d.at(i, c) < best_dist || (d.at(i, c) == best_dist && c < best_center)) {
          best_dist = d.at(i, c);
          best_center = c;
        }
      }
      label[static_cast<std::size_t>(i)] = best_center;
    }
  }
  return label;
}

// Random instance mixing finite distances with sentinel entries arranged as
// consistent temporal spans (sentinel iff spans are disjoint).
inline DistanceMatrix random_dpc_instance(std::mt19937_64& rng, int n, double sentinel) {
  DistanceMatrix d(n, sentinel);
  std::vector<std::pair<int, int>> spans;
  for (int i = 0; i < n; ++i) {
    const int start = uniform_int(rng, 1, 12);
    spans.push_back({start, start + uniform_int(rng, 0, 8)});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool overlap =
          spans[static_cast<std::size_t>(i)].first <= spans[static_cast<std::size_t>(j)].second &&
          spans[static_cast<std::size_t>(j)].first <= spans[static_cast<std::size_t>(i)].second;
      d.set(i, j, overlap ? uniform(rng, 0.01, 9.0) : sentinel);
    }
  }
  return d;
}

}  // namespace supertraj::test
