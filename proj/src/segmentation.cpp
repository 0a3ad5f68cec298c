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

#include "supertraj/segmentation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "supertraj/descriptor.hpp"
#include "supertraj/errors.hpp"
#include "supertraj/parallel.hpp"

namespace supertraj {

namespace {

int round_pixel(float v, int limit) {
  return std::clamp(static_cast<int>(std::lround(v)), 0, limit - 1);
}

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

  void mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.push_back({stage, std::chrono::duration<double, std::milli>(now - last_).count()});
    last_ = now;
  }

 private:
  std::vector<StageTiming>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

GrayImage to_gray_map(const std::vector<float>& values, int width, int height) {
  GrayImage img(width, height);
  for (std::size_t i = 0; i < values.size(); ++i) {
    img.data[i] = static_cast<std::uint8_t>(
        std::clamp(std::lround(values[i] * 255.0f), 0L, 255L));
  }
  return img;
}

}  // namespace

AnnotationMask load_annotation_mask(const std::string& path) {
  const GrayImage img = load_png_gray(path);
  AnnotationMask mask(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    if (img.data[i] == 255) {
      mask.fg[i] = 1;
    } else if (img.data[i] != 0) {
      throw FormatError("annotation mask must contain only 0 and 255: " + path);
    }
  }
  return mask;
}

int TrajectoryLabeling::count(TrajLabel l) const {
  int n = 0;
  for (TrajLabel x : label) {
    if (x == l) ++n;
  }
  return n;
}

TrajectoryLabeling classify_trajectories(const TrajectorySet& trajs, const AnnotationMask& mask) {
  TrajectoryLabeling out;
  out.label.assign(trajs.size(), TrajLabel::unlabeled);
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const Trajectory& traj = trajs.items[i];
    if (traj.start_frame() != 1) continue;
    const TrajPoint& p = traj.points.front();
    const int x = round_pixel(p.x, mask.width);
    const int y = round_pixel(p.y, mask.height);
    out.label[i] = mask.at(x, y) ? TrajLabel::foreground : TrajLabel::background;
  }
  return out;
}

void reverse_track_sources(TrajectoryLabeling& labeling, const TrajectorySet& trajs,
                           const std::vector<TrajectoryFeatures>& features, int width, int height,
                           ReverseTrackMode mode) {
  if (labeling.label.size() != trajs.size() || features.size() != trajs.size()) {
    throw ContractError("labeling/feature sizes must match the trajectory set");
  }
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    if (labeling.label[i] != TrajLabel::unlabeled) continue;
    const TrajPoint& start = trajs.items[i].points.front();
    const float steps = mode == ReverseTrackMode::printed
                            ? 1.0f
                            : static_cast<float>(trajs.items[i].start_frame() - 1);
    const float sx = start.x - steps * features[i].velocity[0];
    const float sy = start.y - steps * features[i].velocity[1];
    if (sx < 0.0f || sy < 0.0f || sx > static_cast<float>(width - 1) ||
        sy > static_cast<float>(height - 1)) {
      labeling.label[i] = TrajLabel::outside;
    }
  }
}

std::optional<double> supertraj_probability(const SuperTrajectory& st,
                                            const TrajectoryLabeling& labeling) {
  if (st.members.empty()) throw ContractError("probability of an empty super-trajectory");
  int nf = 0, nb = 0, no = 0;
  for (int i : st.members) {
    switch (labeling.label[static_cast<std::size_t>(i)]) {
      case TrajLabel::foreground: ++nf; break;
      case TrajLabel::background: ++nb; break;
      case TrajLabel::outside: ++no; break;
      case TrajLabel::unlabeled: break;
    }
  }
  const int labeled = nf + nb + no;
  if (labeled == 0) return std::nullopt;
  return static_cast<double>(nf) / static_cast<double>(labeled);
}

std::vector<std::optional<double>> supertraj_probabilities(const SuperTrajectorySet& sts,
                                                           const TrajectoryLabeling& labeling) {
  std::vector<std::optional<double>> out(sts.size());
  for (std::size_t j = 0; j < sts.size(); ++j) {
    out[j] = supertraj_probability(sts.items[j], labeling);
  }
  return out;
}

AppearanceModel fit_appearance_model(const VideoSequence& video, const TrajectorySet& trajs,
                                     const SuperTrajectorySet& sts,
                                     const std::vector<std::optional<double>>& probabilities,
                                     const TrajectoryLabeling& labeling,
                                     const GmmFitOptions& options) {
  std::vector<std::array<float, 3>> samples;
  std::vector<double> fg_weight;
  std::vector<double> bg_weight;
  for (std::size_t j = 0; j < sts.size(); ++j) {
    if (!probabilities[j]) continue;
    const double pf = *probabilities[j];
    for (int i : sts.items[j].members) {
      const bool outside = labeling.label[static_cast<std::size_t>(i)] == TrajLabel::outside;
      const double wf = outside ? 0.0 : pf;
      const double wb = outside ? 1.0 : 1.0 - pf;
      for (const TrajPoint& p : trajs.items[static_cast<std::size_t>(i)].points) {
        samples.push_back(video.frame(p.t).sample(p.x, p.y));
        fg_weight.push_back(wf);
        bg_weight.push_back(wb);
      }
    }
  }

  AppearanceModel model;
  model.foreground = fit_weighted_gmm(samples, fg_weight, options);
  model.background = fit_weighted_gmm(samples, bg_weight, options);
  return model;
}

PixelEstimates pixel_estimates(const VideoSequence& video, const TrajectorySet& trajs,
                               const SuperTrajectorySet& sts,
                               const std::vector<std::optional<double>>& probabilities,
                               const AppearanceModel* model, int workers) {
  const int width = video.width();
  const int height = video.height();
  const int frame_count = video.frame_count();

  PixelEstimates est;
  est.probability.assign(static_cast<std::size_t>(frame_count),
                         std::vector<float>(static_cast<std::size_t>(width) * height, 0.5f));
  est.clamp_value.assign(static_cast<std::size_t>(frame_count),
                         std::vector<float>(static_cast<std::size_t>(width) * height, -1.0f));

  if (model) {
    parallel_for(static_cast<std::size_t>(frame_count), workers, [&](std::size_t f) {
      const Image& frame = video.frames[f];
      std::vector<float>& out = est.probability[f];
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const std::uint8_t* p = frame.px(x, y);
          out[static_cast<std::size_t>(y) * width + x] = static_cast<float>(model->posterior(
              {static_cast<float>(p[0]), static_cast<float>(p[1]), static_cast<float>(p[2])}));
        }
      }
    });
  }

  // Points of labeled clusters carry the cluster probability and become the
  // clamp set for propagation. Iteration order (cluster id, member, point)
  // makes collisions deterministic.
  for (std::size_t j = 0; j < sts.size(); ++j) {
    if (!probabilities[j]) continue;
    const float pf = static_cast<float>(*probabilities[j]);
    for (int i : sts.items[j].members) {
      for (const TrajPoint& p : trajs.items[static_cast<std::size_t>(i)].points) {
        const int x = round_pixel(p.x, width);
        const int y = round_pixel(p.y, height);
        const std::size_t idx = static_cast<std::size_t>(y) * width + x;
        est.probability[static_cast<std::size_t>(p.t) - 1][idx] = pf;
        est.clamp_value[static_cast<std::size_t>(p.t) - 1][idx] = pf;
      }
    }
  }
  return est;
}

TransitionMatrix build_transition(const std::vector<std::vector<Neighbor>>& neighbors) {
  TransitionMatrix p;
  p.rows.resize(neighbors.size());
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    auto& row = p.rows[i];
    row.reserve(neighbors[i].size() + 1);
    row.push_back({static_cast<int>(i), 1.0});  // self-loop, exp(0)
    for (const Neighbor& nb : neighbors[i]) {
      row.push_back({nb.id, std::exp(-nb.distance)});
    }
    std::sort(row.begin(), row.end(),
              [](const TransitionMatrix::Entry& a, const TransitionMatrix::Entry& b) {
                return a.col < b.col ? true : (a.col == b.col && a.value > b.value);
              });
    // Duplicate neighbor ids collapse to their nearest occurrence.
    row.erase(std::unique(row.begin(), row.end(),
                          [](const TransitionMatrix::Entry& a, const TransitionMatrix::Entry& b) {
                            return a.col == b.col;
                          }),
              row.end());
    double sum = 0.0;
    for (const auto& e : row) sum += e.value;
    for (auto& e : row) e.value /= sum;
  }
  return p;
}

std::vector<double> propagate(const PropagationState& state, int iterations, int workers) {
  const std::size_t n = state.v.size();
  if (state.transition.rows.size() != n || state.clamped.size() != n) {
    throw ContractError("propagation state sizes differ");
  }

  std::vector<double> v = state.v;
  std::vector<double> next(n);
  for (int iter = 0; iter < iterations; ++iter) {
    parallel_for(n, workers, [&](std::size_t i) {
      double sum = 0.0;
      for (const auto& e : state.transition.rows[i]) {
        sum += e.value * v[static_cast<std::size_t>(e.col)];
      }
      next[i] = state.clamped[i] ? state.v[i] : sum;
    });
    std::swap(v, next);
  }
  return v;
}

std::vector<GrayImage> finalize_masks(const std::vector<std::vector<Region>>& regions_by_frame,
                                      const std::vector<double>& v,
                                      const PixelEstimates& estimates, int width, int height,
                                      double threshold) {
  std::vector<GrayImage> masks;
  masks.reserve(regions_by_frame.size());
  std::size_t base = 0;
  for (std::size_t f = 0; f < regions_by_frame.size(); ++f) {
    GrayImage mask(width, height, 0);
    for (const Region& region : regions_by_frame[f]) {
      const bool fg = v[base + static_cast<std::size_t>(region.id)] > threshold;
      if (fg) {
        for (int p : region.pixels) mask.data[static_cast<std::size_t>(p)] = 255;
      }
    }
    const std::vector<float>& clamp = estimates.clamp_value[f];
    for (std::size_t p = 0; p < clamp.size(); ++p) {
      if (clamp[p] >= 0.0f) {
        mask.data[p] = clamp[p] > threshold ? 255 : 0;
      }
    }
    base += regions_by_frame[f].size();
    masks.push_back(std::move(mask));
  }
  return masks;
}

SegmentationResult segment_video(const VideoSequence& video, const std::vector<FlowPair>& flows,
                                 const AnnotationMask& mask, const SegmentationConfig& config,
                                 bool dump_stages) {
  video.validate();
  const int width = video.width();
  const int height = video.height();
  if (mask.width != width || mask.height != height) {
    throw ContractError("annotation mask dimensions must match frame 1");
  }

  SegmentationResult result;
  StageClock clock(result.diagnostics.timings);

  TrackingConfig tracking = config.tracking;
  tracking.workers = config.workers;
  const TrajectorySet trajs = generate_trajectories(video, flows, tracking);
  if (trajs.empty()) throw ContractError("no trajectories survived tracking");
  result.diagnostics.trajectory_count = static_cast<int>(trajs.size());
  result.diagnostics.mean_trajectory_length = trajs.mean_length();
  clock.mark("track");

  const std::vector<TrajectoryFeatures> features =
      compute_all_features(trajs, video, config.delta_t, config.workers);
  clock.mark("features");

  ClusteringConfig clustering = config.clustering;
  clustering.workers = config.workers;
  const SuperTrajectorySet sts = generate_supertrajectories(
      trajs, features, width, height, video.frame_count(), clustering);
  result.diagnostics.supertrajectory_count = static_cast<int>(sts.size());
  clock.mark("cluster");

  TrajectoryLabeling labeling = classify_trajectories(trajs, mask);
  reverse_track_sources(labeling, trajs, features, width, height, config.reverse_track);
  result.diagnostics.foreground_trajectories = labeling.count(TrajLabel::foreground);
  result.diagnostics.background_trajectories = labeling.count(TrajLabel::background);
  result.diagnostics.outside_trajectories = labeling.count(TrajLabel::outside);
  result.diagnostics.unlabeled_trajectories = labeling.count(TrajLabel::unlabeled);

  const std::vector<std::optional<double>> probabilities = supertraj_probabilities(sts, labeling);
  for (const auto& p : probabilities) {
    if (p) ++result.diagnostics.labeled_supertrajectory_count;
  }
  clock.mark("label");

  GmmFitOptions gmm_options;
  gmm_options.components = config.gmm_components;
  AppearanceModel model;
  bool model_ok = true;
  try {
    model = fit_appearance_model(video, trajs, sts, probabilities, labeling, gmm_options);
  } catch (const ModelError&) {
    model_ok = false;  // degenerate annotation; fall back to the 0.5 prior
  }
  result.diagnostics.appearance_model_ok = model_ok;
  clock.mark("appearance");

  const PixelEstimates estimates = pixel_estimates(
      video, trajs, sts, probabilities, model_ok ? &model : nullptr, config.workers);
  clock.mark("pixel_estimates");

  if (dump_stages) {
    for (int f = 0; f < video.frame_count(); ++f) {
      std::vector<float> points(static_cast<std::size_t>(width) * height, 0.5f);
      const auto& clamp = estimates.clamp_value[static_cast<std::size_t>(f)];
      for (std::size_t p = 0; p < clamp.size(); ++p) {
        if (clamp[p] >= 0.0f) points[p] = clamp[p];
      }
      result.stage_point_estimates.push_back(to_gray_map(points, width, height));
      result.stage_pixel_estimates.push_back(
          to_gray_map(estimates.probability[static_cast<std::size_t>(f)], width, height));
    }
  }

  SlicConfig slic;
  slic.target_count = config.superpixel_count;
  std::vector<std::vector<Region>> regions_by_frame(static_cast<std::size_t>(video.frame_count()));
  parallel_for(static_cast<std::size_t>(video.frame_count()), config.workers, [&](std::size_t f) {
    regions_by_frame[f] = slic_regions(video.frames[f], slic);
    for (Region& r : regions_by_frame[f]) r.frame = static_cast<int>(f) + 1;
  });
  std::size_t region_count = 0;
  for (const auto& regions : regions_by_frame) region_count += regions.size();
  result.diagnostics.region_count = static_cast<int>(region_count);
  clock.mark("slic");

  std::vector<std::vector<float>> descriptors(region_count);
  std::vector<int> frame_of(region_count);
  {
    std::vector<std::size_t> base(regions_by_frame.size() + 1, 0);
    for (std::size_t f = 0; f < regions_by_frame.size(); ++f) {
      base[f + 1] = base[f] + regions_by_frame[f].size();
    }
    parallel_for(regions_by_frame.size(), config.workers, [&](std::size_t f) {
      for (const Region& region : regions_by_frame[f]) {
        const std::size_t g = base[f] + static_cast<std::size_t>(region.id);
        descriptors[g] = region_descriptor(region, video.frames[f]);
        frame_of[g] = static_cast<int>(f) + 1;
      }
    });
  }
  clock.mark("descriptors");

  const auto neighbors = knn_backward(descriptors, frame_of, config.nn_count, config.workers);
  clock.mark("knn");

  PropagationState state;
  state.transition = build_transition(neighbors);
  state.v.assign(region_count, 0.0);
  state.clamped.assign(region_count, 0);
  {
    std::size_t g = 0;
    for (std::size_t f = 0; f < regions_by_frame.size(); ++f) {
      const auto& prob = estimates.probability[f];
      const auto& clamp = estimates.clamp_value[f];
      for (const Region& region : regions_by_frame[f]) {
        double sum = 0.0;
        bool has_labeled_point = false;
        for (int p : region.pixels) {
          sum += prob[static_cast<std::size_t>(p)];
          if (clamp[static_cast<std::size_t>(p)] >= 0.0f) has_labeled_point = true;
        }
        state.v[g] = sum / static_cast<double>(region.pixels.size());
        state.clamped[g] = has_labeled_point ? 1 : 0;
        ++g;
      }
    }
  }

  const std::vector<double> v =
      propagate(state, config.propagation_iterations, config.workers);
  clock.mark("propagate");

  if (dump_stages) {
    std::size_t g = 0;
    for (std::size_t f = 0; f < regions_by_frame.size(); ++f) {
      std::vector<float> map(static_cast<std::size_t>(width) * height, 0.0f);
      for (const Region& region : regions_by_frame[f]) {
        for (int p : region.pixels) map[static_cast<std::size_t>(p)] = static_cast<float>(v[g]);
        ++g;
      }
      result.stage_propagated.push_back(to_gray_map(map, width, height));
    }
  }

  result.masks = finalize_masks(regions_by_frame, v, estimates, width, height, config.threshold);
  clock.mark("finalize");
  return result;
}

}  // namespace supertraj
