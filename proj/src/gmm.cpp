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

#include "supertraj/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "supertraj/errors.hpp"

namespace supertraj {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double component_log_density(const GaussianComponent& c, const std::array<float, 3>& x) {
  double e = 0.0;
  double log_det = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double diff = static_cast<double>(x[static_cast<std::size_t>(d)]) - c.mean[static_cast<std::size_t>(d)];
    e += diff * diff / c.var[static_cast<std::size_t>(d)];
    log_det += std::log(c.var[static_cast<std::size_t>(d)]);
  }
  return -0.5 * (3.0 * kLog2Pi + log_det + e);
}

double log_sum_exp(const double* values, std::size_t count) {
  double max_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) max_v = std::max(max_v, values[i]);
  if (!std::isfinite(max_v)) return max_v;
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) sum += std::exp(values[i] - max_v);
  return max_v + std::log(sum);
}

// Uniform double in [0, 1) with a platform-independent construction.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t sample_index(const std::vector<double>& cumulative, double total,
                         std::mt19937_64& rng) {
  const double u = next_uniform(rng) * total;
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

}  // namespace

double Gmm::log_density(const std::array<float, 3>& color) const {
  std::vector<double> terms(components.size());
  for (std::size_t k = 0; k < components.size(); ++k) {
    terms[k] = components[k].weight > 0.0
                   ? std::log(components[k].weight) + component_log_density(components[k], color)
                   : -std::numeric_limits<double>::infinity();
  }
  return log_sum_exp(terms.data(), terms.size());
}

Gmm fit_weighted_gmm(const std::vector<std::array<float, 3>>& samples,
                     const std::vector<double>& weights, const GmmFitOptions& options,
                     std::vector<double>* trace) {
  if (samples.size() != weights.size()) {
    throw ContractError("sample and weight counts differ");
  }
  if (options.components < 1) throw ConfigError("components must be >= 1");

  std::vector<std::size_t> active;
  double total_weight = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (weights[i] > 0.0) {
      active.push_back(i);
      total_weight += weights[i];
    }
  }
  if (active.empty()) throw ModelError("no positively weighted samples");

  const std::size_t n = active.size();
  const int k_count = std::min<int>(options.components, static_cast<int>(n));

  // k-means++ style seeding on the weighted samples.
  std::mt19937_64 rng(options.seed);
  std::vector<GaussianComponent> comps(static_cast<std::size_t>(k_count));
  {
    std::vector<double> cumulative(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += weights[active[i]];
      cumulative[i] = acc;
    }
    std::vector<std::array<double, 3>> seeds;
    const std::size_t first = sample_index(cumulative, acc, rng);
    seeds.push_back({static_cast<double>(samples[active[first]][0]),
                     static_cast<double>(samples[active[first]][1]),
                     static_cast<double>(samples[active[first]][2])});

    std::vector<double> min_dist2(n, std::numeric_limits<double>::infinity());
    while (static_cast<int>(seeds.size()) < k_count) {
      const auto& last = seeds.back();
      double acc2 = 0.0;
      std::vector<double> cumulative2(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& s = samples[active[i]];
        double d2 = 0.0;
        for (int d = 0; d < 3; ++d) {
          const double diff = static_cast<double>(s[static_cast<std::size_t>(d)]) - last[static_cast<std::size_t>(d)];
          d2 += diff * diff;
        }
        min_dist2[i] = std::min(min_dist2[i], d2);
        acc2 += weights[active[i]] * min_dist2[i];
        cumulative2[i] = acc2;
      }
      std::size_t pick = 0;
      if (acc2 > 0.0) {
        pick = sample_index(cumulative2, acc2, rng);
      } else {
        pick = sample_index(cumulative, acc, rng);  // all points identical
      }
      seeds.push_back({static_cast<double>(samples[active[pick]][0]),
                       static_cast<double>(samples[active[pick]][1]),
                       static_cast<double>(samples[active[pick]][2])});
    }
    for (int k = 0; k < k_count; ++k) {
      comps[static_cast<std::size_t>(k)].weight = 1.0 / k_count;
      comps[static_cast<std::size_t>(k)].mean = seeds[static_cast<std::size_t>(k)];
      comps[static_cast<std::size_t>(k)].var = {options.variance_floor * 25.0,
                                                options.variance_floor * 25.0,
                                                options.variance_floor * 25.0};
    }
  }

  std::vector<double> resp(n * static_cast<std::size_t>(k_count));
  std::vector<double> log_terms(static_cast<std::size_t>(k_count));
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // E-step in log space.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& x = samples[active[i]];
      for (int k = 0; k < k_count; ++k) {
        const GaussianComponent& c = comps[static_cast<std::size_t>(k)];
        log_terms[static_cast<std::size_t>(k)] =
            c.weight > 0.0 ? std::log(c.weight) + component_log_density(c, x)
                           : -std::numeric_limits<double>::infinity();
      }
      const double norm = log_sum_exp(log_terms.data(), log_terms.size());
      ll += weights[active[i]] * norm;
      for (int k = 0; k < k_count; ++k) {
        resp[i * static_cast<std::size_t>(k_count) + static_cast<std::size_t>(k)] =
            std::exp(log_terms[static_cast<std::size_t>(k)] - norm);
      }
    }
    if (trace) trace->push_back(ll);

    // M-step with sample weights folded into the responsibilities.
    for (int k = 0; k < k_count; ++k) {
      double nk = 0.0;
      std::array<double, 3> mean = {0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) {
        const double r = weights[active[i]] * resp[i * static_cast<std::size_t>(k_count) + static_cast<std::size_t>(k)];
        nk += r;
        const auto& x = samples[active[i]];
        for (int d = 0; d < 3; ++d) mean[static_cast<std::size_t>(d)] += r * x[static_cast<std::size_t>(d)];
      }
      GaussianComponent& c = comps[static_cast<std::size_t>(k)];
      if (nk <= 1e-12 * total_weight) {
        c.weight = 0.0;  // starved component drops out
        continue;
      }
      for (int d = 0; d < 3; ++d) mean[static_cast<std::size_t>(d)] /= nk;
      std::array<double, 3> var = {0.0, 0.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) {
        const double r = weights[active[i]] * resp[i * static_cast<std::size_t>(k_count) + static_cast<std::size_t>(k)];
        const auto& x = samples[active[i]];
        for (int d = 0; d < 3; ++d) {
          const double diff = static_cast<double>(x[static_cast<std::size_t>(d)]) - mean[static_cast<std::size_t>(d)];
          var[static_cast<std::size_t>(d)] += r * diff * diff;
        }
      }
      c.weight = nk / total_weight;
      c.mean = mean;
      for (int d = 0; d < 3; ++d) {
        c.var[static_cast<std::size_t>(d)] = std::max(options.variance_floor, var[static_cast<std::size_t>(d)] / nk);
      }
    }
    double weight_sum = 0.0;
    for (const auto& c : comps) weight_sum += c.weight;
    if (weight_sum <= 0.0) throw ModelError("all mixture components starved");
    for (auto& c : comps) c.weight /= weight_sum;

    if (std::isfinite(prev_ll) &&
        std::abs(ll - prev_ll) <= options.tolerance * std::abs(prev_ll)) {
      break;
    }
    prev_ll = ll;
  }

  Gmm model;
  for (const auto& c : comps) {
    if (c.weight > 0.0) model.components.push_back(c);
  }
  if (model.components.empty()) throw ModelError("empty mixture after fitting");
  return model;
}

double AppearanceModel::posterior(const std::array<float, 3>& color) const {
  const double lf = foreground.log_density(color);
  const double lb = background.log_density(color);
  if (!std::isfinite(lf) && !std::isfinite(lb)) return 0.5;
  if (!std::isfinite(lf)) return 0.0;
  if (!std::isfinite(lb)) return 1.0;
  // fg / (fg + bg) computed stably through the log-odds.
  return 1.0 / (1.0 + std::exp(lb - lf));
}

}  // namespace supertraj
