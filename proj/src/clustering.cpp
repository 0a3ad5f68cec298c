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

#include "supertraj/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "supertraj/errors.hpp"
#include "supertraj/parallel.hpp"

namespace supertraj {

namespace {

double norm2(float ax, float ay, float bx, float by) {
  const double dx = static_cast<double>(ax) - bx;
  const double dy = static_cast<double>(ay) - by;
  return std::sqrt(dx * dx + dy * dy);
}

DistanceMatrix build_distance_matrix(const std::vector<int>& indices,
                                     const std::vector<TrajectoryFeatures>& features,
                                     const NormalizationContext& ctx, double sentinel) {
  const int n = static_cast<int>(indices.size());
  DistanceMatrix m(n, sentinel);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      m.set(i, j,
            trajectory_distance(features[static_cast<std::size_t>(indices[static_cast<std::size_t>(i)])],
                                features[static_cast<std::size_t>(indices[static_cast<std::size_t>(j)])],
                                ctx, sentinel));
    }
  }
  return m;
}

// Single representative of a cluster: the member ranked first by DPC with a
// requested center count of one.
int elect_center(const std::vector<int>& members, const std::vector<TrajectoryFeatures>& features,
                 const NormalizationContext& ctx, const ClusteringConfig& cfg) {
  if (members.size() == 1) return members.front();
  const DistanceMatrix m = build_distance_matrix(members, features, ctx, cfg.sentinel);
  const std::vector<int> local = select_centers(m, 1, cfg.density_mode);
  return members[static_cast<std::size_t>(local.front())];
}

struct ClusterScratch {
  std::vector<int> center_of_label;          // label -> trajectory index of center
  std::vector<std::vector<int>> members;     // label -> member trajectory indices
};

}  // namespace

NormalizationContext make_normalization_context(int width, int height, int spatial_grids,
                                                const std::vector<TrajectoryFeatures>& features) {
  if (spatial_grids < 1) throw ConfigError("spatial_grids must be >= 1");
  if (width < 1 || height < 1) throw ContractError("invalid frame dimensions");

  NormalizationContext ctx;
  ctx.sampling_step = std::sqrt(static_cast<double>(width) * height / spatial_grids);

  double motion = 0.0;
  for (const TrajectoryFeatures& f : features) {
    motion += std::hypot(static_cast<double>(f.velocity[0]), static_cast<double>(f.velocity[1]));
  }
  if (!features.empty()) motion /= static_cast<double>(features.size());
  ctx.mean_motion = motion > 0.0 ? motion : 1.0;
  return ctx;
}

double trajectory_distance(const TrajectoryFeatures& a, const TrajectoryFeatures& b,
                           const NormalizationContext& ctx, double sentinel) {
  if (!a.overlaps(b)) return sentinel;
  const double loc = norm2(a.location[0], a.location[1], b.location[0], b.location[1]) /
                     ctx.sampling_step;
  const double dr = static_cast<double>(a.color[0]) - b.color[0];
  const double dg = static_cast<double>(a.color[1]) - b.color[1];
  const double db = static_cast<double>(a.color[2]) - b.color[2];
  const double col = std::sqrt(dr * dr + dg * dg + db * db) / ctx.max_intensity;
  const double vel = norm2(a.velocity[0], a.velocity[1], b.velocity[0], b.velocity[1]) /
                     ctx.mean_motion;
  return loc + col + vel;
}

GridPartition grid_partition(const TrajectorySet& trajs, int spatial_grids, int width,
                             int height) {
  if (spatial_grids < 1) throw ConfigError("spatial_grids must be >= 1");

  GridPartition grid;
  grid.step = std::sqrt(static_cast<double>(width) * height / spatial_grids);
  grid.cols = std::max(1, static_cast<int>(width / grid.step));
  grid.rows = std::max(1, static_cast<int>(height / grid.step));
  grid.groups.assign(static_cast<std::size_t>(grid.cols) * grid.rows, {});

  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const TrajPoint& start = trajs.items[i].points.front();
    const int cx = std::min(grid.cols - 1, static_cast<int>(start.x / grid.step));
    const int cy = std::min(grid.rows - 1, static_cast<int>(start.y / grid.step));
    grid.groups[static_cast<std::size_t>(cy) * grid.cols + cx].push_back(static_cast<int>(i));
  }
  return grid;
}

std::vector<int> initial_centers(const std::vector<int>& group,
                                 const std::vector<TrajectoryFeatures>& features, int frame_count,
                                 double mean_length, const NormalizationContext& ctx,
                                 const ClusteringConfig& cfg) {
  if (group.empty()) throw ContractError("initial_centers requires a non-empty group");
  const int wanted =
      std::max(1, static_cast<int>(std::llround(static_cast<double>(frame_count) / mean_length)));

  const DistanceMatrix m = build_distance_matrix(group, features, ctx, cfg.sentinel);
  std::vector<int> centers;
  for (int local : select_centers(m, wanted, cfg.density_mode)) {
    centers.push_back(group[static_cast<std::size_t>(local)]);
  }
  return centers;
}

SuperTrajectorySet refine(const TrajectorySet& trajs,
                          const std::vector<TrajectoryFeatures>& features,
                          std::vector<int> centers, const NormalizationContext& ctx,
                          const ClusteringConfig& cfg) {
  if (centers.empty()) throw ContractError("refine requires at least one center");
  if (cfg.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (cfg.min_cluster_size < 1) throw ConfigError("min_cluster_size must be >= 1");

  const std::size_t n = trajs.size();
  const double window = ctx.sampling_step;  // half-width of the 2R x 2R volume

  // Scanning centers in ascending id order with a strict "<" makes the
  // lowest center id win distance ties.
  auto assign_all = [&](const std::vector<int>& cs) {
    std::vector<int> owner(n, -1);
    parallel_for(n, cfg.workers, [&](std::size_t i) {
      const TrajectoryFeatures& f = features[i];
      double best = cfg.sentinel;
      int best_pos = -1;
      for (std::size_t c = 0; c < cs.size(); ++c) {
        const TrajectoryFeatures& fc = features[static_cast<std::size_t>(cs[c])];
        if (std::abs(f.location[0] - fc.location[0]) > window ||
            std::abs(f.location[1] - fc.location[1]) > window) {
          continue;
        }
        const double dist = trajectory_distance(f, fc, ctx, cfg.sentinel);
        if (dist < best) {
          best = dist;
          best_pos = static_cast<int>(c);
        }
      }
      if (best_pos < 0) {
        // No window matched: nearest center overall.
        double orphan_best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < cs.size(); ++c) {
          const double dist =
              trajectory_distance(f, features[static_cast<std::size_t>(cs[c])], ctx, cfg.sentinel);
          if (dist < orphan_best) {
            orphan_best = dist;
            best_pos = static_cast<int>(c);
          }
        }
      }
      owner[i] = best_pos;
    });
    return owner;
  };

  std::vector<std::vector<int>> members;
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    std::sort(centers.begin(), centers.end());
    const std::vector<int> owner = assign_all(centers);

    members.assign(centers.size(), {});
    for (std::size_t i = 0; i < n; ++i) {
      members[static_cast<std::size_t>(owner[i])].push_back(static_cast<int>(i));
    }

    // Update: re-elect each non-empty cluster's center.
    std::vector<int> new_centers(centers.size(), -1);
    parallel_for(centers.size(), cfg.workers, [&](std::size_t c) {
      if (!members[c].empty()) new_centers[c] = elect_center(members[c], features, ctx, cfg);
    });
    std::vector<int> compact_centers;
    std::vector<std::vector<int>> compact_members;
    for (std::size_t c = 0; c < new_centers.size(); ++c) {
      if (new_centers[static_cast<std::size_t>(c)] >= 0) {
        compact_centers.push_back(new_centers[c]);
        compact_members.push_back(std::move(members[c]));
      }
    }
    centers = std::move(compact_centers);
    members = std::move(compact_members);
  }

  // Merge: dissolve clusters below the size floor into surviving neighbors.
  std::vector<std::size_t> survivors;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (static_cast<int>(members[c].size()) >= cfg.min_cluster_size) survivors.push_back(c);
  }
  std::sort(survivors.begin(), survivors.end(), [&](std::size_t a, std::size_t b) {
    return centers[a] < centers[b];
  });
  if (survivors.empty()) {
    // Degenerate input: keep the largest cluster so the output stays a
    // non-empty partition.
    std::size_t largest = 0;
    for (std::size_t c = 1; c < centers.size(); ++c) {
      if (members[c].size() > members[largest].size() ||
          (members[c].size() == members[largest].size() && centers[c] < centers[largest])) {
        largest = c;
      }
    }
    survivors.push_back(largest);
  }
  std::vector<char> survives(centers.size(), 0);
  for (std::size_t c : survivors) survives[c] = 1;

  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (survives[c] || members[c].empty()) continue;
    for (int i : members[c]) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = survivors.front();
      for (std::size_t s : survivors) {
        const double dist = trajectory_distance(
            features[static_cast<std::size_t>(i)],
            features[static_cast<std::size_t>(centers[s])], ctx, cfg.sentinel);
        if (dist < best) {
          best = dist;
          best_c = s;
        }
      }
      members[best_c].push_back(i);
    }
    members[c].clear();
  }

  SuperTrajectorySet out;
  for (std::size_t s : survivors) {
    std::sort(members[s].begin(), members[s].end());
    SuperTrajectory st;
    st.id = static_cast<int>(out.items.size());
    st.center = centers[s];
    st.members = members[s];

    double lx = 0.0, ly = 0.0, cr = 0.0, cg = 0.0, cb = 0.0, vx = 0.0, vy = 0.0;
    int first = std::numeric_limits<int>::max();
    int last = 0;
    for (int i : st.members) {
      const TrajectoryFeatures& f = features[static_cast<std::size_t>(i)];
      lx += f.location[0];
      ly += f.location[1];
      cr += f.color[0];
      cg += f.color[1];
      cb += f.color[2];
      vx += f.velocity[0];
      vy += f.velocity[1];
      first = std::min(first, f.start_frame);
      last = std::max(last, f.end_frame);
    }
    const double m = static_cast<double>(st.members.size());
    st.mean_location = {static_cast<float>(lx / m), static_cast<float>(ly / m)};
    st.mean_color = {static_cast<float>(cr / m), static_cast<float>(cg / m),
                     static_cast<float>(cb / m)};
    st.mean_velocity = {static_cast<float>(vx / m), static_cast<float>(vy / m)};
    st.start_frame = first;
    st.end_frame = last;
    out.items.push_back(std::move(st));
  }
  return out;
}

SuperTrajectorySet generate_supertrajectories(const TrajectorySet& trajs,
                                              const std::vector<TrajectoryFeatures>& features,
                                              int width, int height, int frame_count,
                                              const ClusteringConfig& cfg) {
  if (trajs.empty()) throw ContractError("cannot cluster an empty trajectory set");
  if (features.size() != trajs.size()) {
    throw ContractError("feature count must match trajectory count");
  }

  const NormalizationContext ctx =
      make_normalization_context(width, height, cfg.spatial_grids, features);
  const GridPartition grid = grid_partition(trajs, cfg.spatial_grids, width, height);
  const double mean_length = trajs.mean_length();

  std::vector<std::vector<int>> per_group(grid.groups.size());
  parallel_for(grid.groups.size(), cfg.workers, [&](std::size_t g) {
    if (!grid.groups[g].empty()) {
      per_group[g] = initial_centers(grid.groups[g], features, frame_count, mean_length, ctx, cfg);
    }
  });

  std::vector<int> centers;
  for (const auto& group_centers : per_group) {
    centers.insert(centers.end(), group_centers.begin(), group_centers.end());
  }
  return refine(trajs, features, std::move(centers), ctx, cfg);
}

void write_supertrajectories(const std::string& path, const SuperTrajectorySet& sts,
                             const TrajectorySet& trajs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write super-trajectory file: " + path);
  for (const SuperTrajectory& st : sts.items) {
    out << "supertraj " << st.id << ' ' << trajs.items[static_cast<std::size_t>(st.center)].id
        << ' ' << st.members.size() << '\n';
    for (std::size_t k = 0; k < st.members.size(); ++k) {
      if (k) out << ' ';
      out << trajs.items[static_cast<std::size_t>(st.members[k])].id;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing super-trajectory file: " + path);
}

SuperTrajectorySet read_supertrajectories(const std::string& path, const TrajectorySet& trajs) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open super-trajectory file: " + path);

  std::vector<int> position_of_id;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const int id = trajs.items[i].id;
    if (id < 0) throw FormatError("trajectory set has unassigned ids");
    if (id >= static_cast<int>(position_of_id.size())) {
      position_of_id.resize(static_cast<std::size_t>(id) + 1, -1);
    }
    position_of_id[static_cast<std::size_t>(id)] = static_cast<int>(i);
  }
  auto resolve = [&](int id) {
    if (id < 0 || id >= static_cast<int>(position_of_id.size()) ||
        position_of_id[static_cast<std::size_t>(id)] < 0) {
      throw FormatError("unknown trajectory id in: " + path);
    }
    return position_of_id[static_cast<std::size_t>(id)];
  };

  SuperTrajectorySet out;
  std::string tag;
  while (in >> tag) {
    if (tag != "supertraj") throw FormatError("bad record tag in: " + path);
    SuperTrajectory st;
    int center_id = 0;
    std::size_t count = 0;
    if (!(in >> st.id >> center_id >> count)) throw FormatError("bad record header in: " + path);
    st.center = resolve(center_id);
    st.members.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      int member_id = 0;
      if (!(in >> member_id)) throw FormatError("truncated member list in: " + path);
      st.members.push_back(resolve(member_id));
    }
    out.items.push_back(std::move(st));
  }
  return out;
}

Image render_supertrajectory_frame(const TrajectorySet& trajs, const SuperTrajectorySet& sts,
                                   int frame, int width, int height, int stride) {
  Image img(width, height, {0, 0, 0});
  for (const SuperTrajectory& st : sts.items) {
    const std::array<std::uint8_t, 3> color = {
        static_cast<std::uint8_t>(std::clamp(st.mean_color[0], 0.0f, 255.0f)),
        static_cast<std::uint8_t>(std::clamp(st.mean_color[1], 0.0f, 255.0f)),
        static_cast<std::uint8_t>(std::clamp(st.mean_color[2], 0.0f, 255.0f))};
    for (int i : st.members) {
      const Trajectory& traj = trajs.items[static_cast<std::size_t>(i)];
      if (frame < traj.start_frame() || frame > traj.end_frame()) continue;
      const TrajPoint& p = traj.points[static_cast<std::size_t>(frame - traj.start_frame())];
      const int px = static_cast<int>(std::lround(p.x));
      const int py = static_cast<int>(std::lround(p.y));
      for (int dy = 0; dy < stride; ++dy) {
        for (int dx = 0; dx < stride; ++dx) {
          const int x = px + dx;
          const int y = py + dy;
          if (x >= 0 && x < width && y >= 0 && y < height) img.set(x, y, color);
        }
      }
    }
  }
  return img;
}

}  // namespace supertraj
