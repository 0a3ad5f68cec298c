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

#include "supertraj/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "supertraj/errors.hpp"
#include "supertraj/parallel.hpp"

namespace supertraj {

namespace {

constexpr double kSurvivalThreshold = 0.5;

bool in_frame(float x, float y, int width, int height) {
  return x >= 0.0f && y >= 0.0f && x <= static_cast<float>(width - 1) &&
         y <= static_cast<float>(height - 1);
}

// Seed-grid bookkeeping: cell (gx, gy) holds points with floor(coord/stride)
// equal to its index; the trailing remainder folds into the last cell.
struct SeedGrid {
  int stride;
  int cells_x;
  int cells_y;

  SeedGrid(int width, int height, int stride_px)
      : stride(stride_px),
        cells_x((width - 1) / stride_px + 1),
        cells_y((height - 1) / stride_px + 1) {}

  int cell_of(float x, float y) const {
    const int gx = std::min(static_cast<int>(x) / stride, cells_x - 1);
    const int gy = std::min(static_cast<int>(y) / stride, cells_y - 1);
    return gy * cells_x + gx;
  }
  int cell_count() const { return cells_x * cells_y; }
};

}  // namespace

double TrajectorySet::mean_length() const {
  if (items.empty()) return 0.0;
  double sum = 0.0;
  for (const Trajectory& t : items) sum += t.length();
  return sum / static_cast<double>(items.size());
}

double appearance_energy(const Image& frame_prev, const Image& frame_cur,
                         const TrajPoint& p_prev, const TrajPoint& p_cur) {
  if (p_cur.t != p_prev.t + 1) {
    throw ContractError("appearance energy requires consecutive frame indices");
  }
  const auto a = frame_prev.sample(p_prev.x, p_prev.y);
  const auto b = frame_cur.sample(p_cur.x, p_cur.y);
  const double dr = static_cast<double>(b[0]) - a[0];
  const double dg = static_cast<double>(b[1]) - a[1];
  const double db = static_cast<double>(b[2]) - a[2];
  return std::sqrt(dr * dr + dg * dg + db * db);
}

double occlusion_energy(std::array<float, 2> fwd, std::array<float, 2> bwd) {
  const double fn = std::hypot(static_cast<double>(fwd[0]), static_cast<double>(fwd[1]));
  const double bn = std::hypot(static_cast<double>(bwd[0]), static_cast<double>(bwd[1]));
  const double denom = fn + bn;
  if (denom == 0.0) return 0.0;
  const double sx = static_cast<double>(bwd[0]) + fwd[0];
  const double sy = static_cast<double>(bwd[1]) + fwd[1];
  return std::hypot(sx, sy) / denom;
}

double step_probability(double e_app, double e_occ) {
  return std::exp(-(e_app + e_occ));
}

Trajectory track_point(const TrajPoint& start, const VideoSequence& video,
                       const std::vector<FlowPair>& flows, double appearance_rescale) {
  const int width = video.width();
  const int height = video.height();
  if (!in_frame(start.x, start.y, width, height) || start.t < 1 ||
      start.t > video.frame_count()) {
    throw ContractError("track seed out of bounds");
  }

  Trajectory traj;
  traj.points.push_back(start);
  double survival = 1.0;

  TrajPoint cur = start;
  const int last_frame = video.frame_count();
  while (cur.t < last_frame) {
    const FlowField& fwd = flows[static_cast<std::size_t>(cur.t)].forward;
    if (fwd.empty()) throw ContractError("missing forward flow for frame " + std::to_string(cur.t));
    const auto motion = sample_bilinear(fwd, cur.x, cur.y);

    TrajPoint next{cur.x + motion[0], cur.y + motion[1], cur.t + 1};
    if (!in_frame(next.x, next.y, width, height)) break;

    const FlowField& bwd = flows[static_cast<std::size_t>(next.t)].backward;
    if (bwd.empty()) throw ContractError("missing backward flow for frame " + std::to_string(next.t));
    const auto back = sample_bilinear(bwd, next.x, next.y);

    const double e_app =
        appearance_rescale * appearance_energy(video.frame(cur.t), video.frame(next.t), cur, next);
    const double e_occ = occlusion_energy(motion, back);
    survival *= step_probability(e_app, e_occ);
    if (survival < kSurvivalThreshold) break;

    traj.points.push_back(next);
    cur = next;
  }
  return traj;
}

TrackingResult generate_trajectories_full(const VideoSequence& video,
                                          const std::vector<FlowPair>& flows,
                                          const TrackingConfig& cfg) {
  video.validate();
  if (cfg.seed_stride < 1) throw ConfigError("seed_stride must be >= 1");

  const int width = video.width();
  const int height = video.height();
  const int frame_count = video.frame_count();
  const SeedGrid grid(width, height, cfg.seed_stride);

  // covered[t][cell]: some live trajectory has a point at frame t in cell.
  std::vector<std::vector<std::uint8_t>> covered(
      static_cast<std::size_t>(frame_count) + 1,
      std::vector<std::uint8_t>(static_cast<std::size_t>(grid.cell_count()), 0));

  TrackingResult result;
  auto absorb = [&](Trajectory&& traj) {
    for (const TrajPoint& p : traj.points) {
      covered[static_cast<std::size_t>(p.t)][static_cast<std::size_t>(grid.cell_of(p.x, p.y))] = 1;
    }
    if (traj.length() >= cfg.min_length) {
      result.kept.items.push_back(std::move(traj));
    } else {
      result.discarded.push_back(std::move(traj));
    }
  };

  for (int t = 1; t <= frame_count; ++t) {
    std::vector<TrajPoint> seeds;
    for (int y = 0; y < height; y += cfg.seed_stride) {
      for (int x = 0; x < width; x += cfg.seed_stride) {
        const int cell = grid.cell_of(static_cast<float>(x), static_cast<float>(y));
        if (!covered[static_cast<std::size_t>(t)][static_cast<std::size_t>(cell)]) {
          seeds.push_back(TrajPoint{static_cast<float>(x), static_cast<float>(y), t});
        }
      }
    }

    std::vector<Trajectory> tracked(seeds.size());
    parallel_for(seeds.size(), cfg.workers, [&](std::size_t i) {
      tracked[i] = track_point(seeds[i], video, flows, cfg.appearance_rescale);
    });
    for (Trajectory& traj : tracked) absorb(std::move(traj));
  }

  for (std::size_t i = 0; i < result.kept.items.size(); ++i) {
    result.kept.items[i].id = static_cast<int>(i);
  }
  return result;
}

TrajectorySet generate_trajectories(const VideoSequence& video,
                                    const std::vector<FlowPair>& flows,
                                    const TrackingConfig& cfg) {
  return generate_trajectories_full(video, flows, cfg).kept;
}

TrajectoryFeatures trajectory_features(const Trajectory& traj, const VideoSequence& video,
                                       int delta_t) {
  if (traj.points.empty()) throw ContractError("features of an empty trajectory");
  if (delta_t < 1) throw ConfigError("delta_t must be >= 1");

  TrajectoryFeatures f;
  f.start_frame = traj.start_frame();
  f.end_frame = traj.end_frame();

  const int length = traj.length();
  double lx = 0.0, ly = 0.0;
  double cr = 0.0, cg = 0.0, cb = 0.0;
  for (const TrajPoint& p : traj.points) {
    lx += p.x;
    ly += p.y;
    const auto rgb = video.frame(p.t).sample(p.x, p.y);
    cr += rgb[0];
    cg += rgb[1];
    cb += rgb[2];
  }
  f.location = {static_cast<float>(lx / length), static_cast<float>(ly / length)};
  f.color = {static_cast<float>(cr / length), static_cast<float>(cg / length),
             static_cast<float>(cb / length)};

  double vx = 0.0, vy = 0.0;
  if (length > delta_t) {
    const int terms = length - delta_t;
    for (int n = 0; n < terms; ++n) {
      vx += (traj.points[static_cast<std::size_t>(n + delta_t)].x - traj.points[static_cast<std::size_t>(n)].x) /
            static_cast<double>(delta_t);
      vy += (traj.points[static_cast<std::size_t>(n + delta_t)].y - traj.points[static_cast<std::size_t>(n)].y) /
            static_cast<double>(delta_t);
    }
    vx /= terms;
    vy /= terms;
  } else if (length > 1) {
    vx = (traj.points.back().x - traj.points.front().x) / static_cast<double>(length - 1);
    vy = (traj.points.back().y - traj.points.front().y) / static_cast<double>(length - 1);
  }
  f.velocity = {static_cast<float>(vx), static_cast<float>(vy)};
  return f;
}

std::vector<TrajectoryFeatures> compute_all_features(const TrajectorySet& trajs,
                                                     const VideoSequence& video,
                                                     int delta_t, int workers) {
  std::vector<TrajectoryFeatures> features(trajs.size());
  parallel_for(trajs.size(), workers, [&](std::size_t i) {
    features[i] = trajectory_features(trajs.items[i], video, delta_t);
  });
  return features;
}

void write_trajectories(const std::string& path, const TrajectorySet& trajs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write trajectory file: " + path);
  char line[64];
  for (const Trajectory& traj : trajs.items) {
    out << traj.id << ' ' << traj.length() << ' ' << traj.start_frame() << '\n';
    for (const TrajPoint& p : traj.points) {
      std::snprintf(line, sizeof(line), "%.3f %.3f\n", static_cast<double>(p.x),
                    static_cast<double>(p.y));
      out << line;
    }
  }
  if (!out) throw IoError("failed writing trajectory file: " + path);
}

TrajectorySet read_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory file: " + path);

  TrajectorySet set;
  int id = 0, length = 0, start = 0;
  while (in >> id >> length >> start) {
    if (length < 1 || start < 1) throw FormatError("invalid trajectory header in: " + path);
    Trajectory traj;
    traj.id = id;
    traj.points.reserve(static_cast<std::size_t>(length));
    for (int n = 0; n < length; ++n) {
      float x = 0.0f, y = 0.0f;
      if (!(in >> x >> y)) throw FormatError("truncated trajectory points in: " + path);
      traj.points.push_back(TrajPoint{x, y, start + n});
    }
    set.items.push_back(std::move(traj));
  }
  return set;
}

}  // namespace supertraj
