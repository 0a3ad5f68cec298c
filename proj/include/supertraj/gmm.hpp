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
#include <cstdint>
#include <vector>

namespace supertraj {

// Diagonal-covariance Gaussian mixture over RGB (0-255 scale).
struct GaussianComponent {
  double weight = 0.0;
  std::array<double, 3> mean = {0.0, 0.0, 0.0};
  std::array<double, 3> var = {1.0, 1.0, 1.0};
};

struct Gmm {
  std::vector<GaussianComponent> components;

  double log_density(const std::array<float, 3>& color) const;
};

struct GmmFitOptions {
  int components = 5;
  int max_iterations = 50;
  double tolerance = 1e-6;  // relative log-likelihood change
  double variance_floor = 1.0;
  std::uint64_t seed = 0x5357a11u;  // k-means++ style init draws from here
};

// Weighted EM. Samples with non-positive weight are ignored; throws
// ModelError when no positive-weight samples exist. When trace is given it
// receives the weighted log-likelihood after every EM iteration.
Gmm fit_weighted_gmm(const std::vector<std::array<float, 3>>& samples,
                     const std::vector<double>& weights, const GmmFitOptions& options,
                     std::vector<double>* trace = nullptr);

// Foreground/background pair; posterior is fg / (fg + bg), 0.5 when both
// densities underflow.
struct AppearanceModel {
  Gmm foreground;
  Gmm background;

  double posterior(const std::array<float, 3>& color) const;
};

}  // namespace supertraj
