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

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "supertraj/errors.hpp"
#include "supertraj/trajectory.hpp"
#include "test_util.hpp"

using namespace supertraj;
using supertraj::test::ScratchDir;

namespace {

VideoSequence constant_video(int w, int h, int frames, std::array<std::uint8_t, 3> color) {
  VideoSequence video;
  for (int t = 0; t < frames; ++t) video.frames.emplace_back(w, h, color);
  return video;
}

std::vector<FlowPair> constant_flow(int w, int h, int frames, std::array<float, 2> fwd) {
  std::vector<FlowPair> flows = make_flow_pairs(frames);
  for (int t = 1; t <= frames; ++t) {
    if (t < frames) flows[static_cast<std::size_t>(t)].forward = FlowField(w, h, fwd);
    if (t > 1) flows[static_cast<std::size_t>(t)].backward = FlowField(w, h, {-fwd[0], -fwd[1]});
  }
  return flows;
}

}  // namespace

TEST_CASE("appearance energy is the RGB distance at the sampled points") {
  Image a(1, 1, {10, 20, 30});
  Image b(1, 1, {13, 24, 30});
  const TrajPoint p1{0.0f, 0.0f, 1};
  const TrajPoint p2{0.0f, 0.0f, 2};

  CHECK(appearance_energy(a, a, p1, p2) == doctest::Approx(0.0));
  CHECK(appearance_energy(a, b, p1, p2) == doctest::Approx(5.0));

  Image black(1, 1, {0, 0, 0});
  Image white(1, 1, {255, 255, 255});
  CHECK(appearance_energy(black, white, p1, p2) == doctest::Approx(255.0 * std::sqrt(3.0)));

  CHECK_THROWS_AS(appearance_energy(a, b, p1, TrajPoint{0, 0, 3}), ContractError);
}

TEST_CASE("occlusion energy matches the flow-consistency ratio") {
  CHECK(occlusion_energy({3.0f, 4.0f}, {-3.0f, -4.0f}) == doctest::Approx(0.0));
  CHECK(occlusion_energy({1.0f, 0.0f}, {1.0f, 0.0f}) == doctest::Approx(1.0));
  CHECK(occlusion_energy({3.0f, 0.0f}, {-1.0f, 0.0f}) == doctest::Approx(0.5));
  CHECK(occlusion_energy({0.0f, 0.0f}, {0.0f, 0.0f}) == doctest::Approx(0.0));

  // Symmetric and scale-invariant.
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const std::array<float, 2> f = {static_cast<float>(test::uniform(rng, -5, 5)),
                                    static_cast<float>(test::uniform(rng, -5, 5))};
    const std::array<float, 2> b = {static_cast<float>(test::uniform(rng, -5, 5)),
                                    static_cast<float>(test::uniform(rng, -5, 5))};
    CHECK(occlusion_energy(f, b) == doctest::Approx(occlusion_energy(b, f)));
    const float s = 3.25f;
    CHECK(occlusion_energy({s * f[0], s * f[1]}, {s * b[0], s * b[1]}) ==
          doctest::Approx(occlusion_energy(f, b)));
  }
}

TEST_CASE("step probability") {
  CHECK(step_probability(0.0, 0.0) == doctest::Approx(1.0));
  CHECK(step_probability(std::log(2.0), 0.0) == doctest::Approx(0.5));
  CHECK(step_probability(4.0, 6.0) == doctest::Approx(std::exp(-10.0)));
}

TEST_CASE("track_point follows flow until termination") {
  SUBCASE("static scene keeps a full-length static track") {
    const VideoSequence video = constant_video(10, 10, 10, {90, 90, 90});
    const auto flows = constant_flow(10, 10, 10, {0.0f, 0.0f});
    const Trajectory traj = track_point({5.0f, 5.0f, 1}, video, flows, 1.0 / 50.0);
    REQUIRE(traj.length() == 10);
    for (int n = 0; n < 10; ++n) {
      CHECK(traj.points[static_cast<std::size_t>(n)].x == 5.0f);
      CHECK(traj.points[static_cast<std::size_t>(n)].y == 5.0f);
      CHECK(traj.points[static_cast<std::size_t>(n)].t == n + 1);
    }
  }

  SUBCASE("uniform motion advances until the border") {
    const VideoSequence video = constant_video(20, 8, 30, {90, 90, 90});
    const auto flows = constant_flow(20, 8, 30, {2.0f, 0.0f});
    const Trajectory traj = track_point({5.0f, 3.0f, 1}, video, flows, 1.0 / 50.0);
    // x = 5 + 2(n-1) <= 19 keeps 8 points; the 9th would leave the frame.
    REQUIRE(traj.length() == 8);
    for (int n = 0; n < traj.length(); ++n) {
      CHECK(traj.points[static_cast<std::size_t>(n)].x == doctest::Approx(5.0 + 2.0 * n));
    }
  }

  SUBCASE("an erased object terminates the track within one frame") {
    const int erase_frame = 6;
    VideoSequence video;
    for (int t = 1; t <= 10; ++t) {
      Image frame(12, 12, {10, 10, 10});
      if (t < erase_frame) {
        for (int y = 4; y < 8; ++y) {
          for (int x = 4; x < 8; ++x) frame.set(x, y, {250, 250, 250});
        }
      }
      video.frames.push_back(std::move(frame));
    }
    const auto flows = constant_flow(12, 12, 10, {0.0f, 0.0f});
    const Trajectory traj = track_point({5.0f, 5.0f, 1}, video, flows, 1.0 / 50.0);
    CHECK(traj.end_frame() >= erase_frame - 1);
    CHECK(traj.end_frame() <= erase_frame);
  }

  SUBCASE("out-of-bounds seed raises") {
    const VideoSequence video = constant_video(10, 10, 4, {0, 0, 0});
    const auto flows = constant_flow(10, 10, 4, {0.0f, 0.0f});
    CHECK_THROWS_AS(track_point({12.0f, 5.0f, 1}, video, flows, 0.02), ContractError);
  }
}

TEST_CASE("generate_trajectories seeds, filters and stays deterministic") {
  SUBCASE("two static frames leave nothing above the length filter") {
    const VideoSequence video = constant_video(8, 8, 2, {50, 50, 50});
    const auto flows = constant_flow(8, 8, 2, {0.0f, 0.0f});
    TrackingConfig cfg;
    cfg.seed_stride = 2;
    const TrackingResult result = generate_trajectories_full(video, flows, cfg);
    CHECK(result.kept.size() == 0);
    CHECK(result.discarded.size() == 16);
  }

  SUBCASE("a static 10x10 video with stride 1 yields one track per pixel") {
    const VideoSequence video = constant_video(10, 10, 20, {50, 50, 50});
    const auto flows = constant_flow(10, 10, 20, {0.0f, 0.0f});
    TrackingConfig cfg;
    cfg.seed_stride = 1;
    const TrajectorySet trajs = generate_trajectories(video, flows, cfg);
    REQUIRE(trajs.size() == 100);
    for (const Trajectory& t : trajs.items) CHECK(t.length() == 20);
  }

  SUBCASE("every grid cell of every frame is touched by some track") {
    // Moving pattern so tracks die and re-seeding matters.
    VideoSequence video;
    const int w = 16, h = 12, frames = 9;
    for (int t = 1; t <= frames; ++t) {
      Image frame(w, h, {20, 20, 20});
      for (int y = 2; y < 6; ++y) {
        for (int x = 2 + t; x < 6 + t; ++x) frame.set(x, y, {240, 240, 240});
      }
      video.frames.push_back(std::move(frame));
    }
    auto flows = make_flow_pairs(frames);
    for (int t = 1; t <= frames; ++t) {
      if (t < frames) {
        FlowField f(w, h, {0.0f, 0.0f});
        for (int y = 2; y < 6; ++y) {
          for (int x = 2 + t; x < 6 + t; ++x) f.set(x, y, {1.0f, 0.0f});
        }
        flows[static_cast<std::size_t>(t)].forward = std::move(f);
      }
      if (t > 1) {
        FlowField f(w, h, {0.0f, 0.0f});
        for (int y = 2; y < 6; ++y) {
          for (int x = 2 + t; x < 6 + t; ++x) f.set(x, y, {-1.0f, 0.0f});
        }
        flows[static_cast<std::size_t>(t)].backward = std::move(f);
      }
    }
    TrackingConfig cfg;
    cfg.seed_stride = 2;
    const TrackingResult result = generate_trajectories_full(video, flows, cfg);

    // Coverage oracle re-implementing the cell rule.
    const int cells_x = (w - 1) / cfg.seed_stride + 1;
    const int cells_y = (h - 1) / cfg.seed_stride + 1;
    std::vector<std::vector<char>> covered(
        static_cast<std::size_t>(frames) + 1,
        std::vector<char>(static_cast<std::size_t>(cells_x) * cells_y, 0));
    auto mark = [&](const Trajectory& traj) {
      for (const TrajPoint& p : traj.points) {
        const int gx = std::min(static_cast<int>(p.x) / cfg.seed_stride, cells_x - 1);
        const int gy = std::min(static_cast<int>(p.y) / cfg.seed_stride, cells_y - 1);
        covered[static_cast<std::size_t>(p.t)][static_cast<std::size_t>(gy) * cells_x + gx] = 1;
      }
    };
    for (const Trajectory& t : result.kept.items) mark(t);
    for (const Trajectory& t : result.discarded) mark(t);
    for (int t = 1; t <= frames; ++t) {
      for (const char c : covered[static_cast<std::size_t>(t)]) CHECK(c == 1);
    }
  }

  SUBCASE("identical output at any worker count") {
    const VideoSequence video = constant_video(14, 10, 8, {120, 60, 60});
    const auto flows = constant_flow(14, 10, 8, {1.0f, 0.0f});
    TrackingConfig one;
    one.seed_stride = 2;
    one.workers = 1;
    TrackingConfig four = one;
    four.workers = 4;
    const TrajectorySet a = generate_trajectories(video, flows, one);
    const TrajectorySet b = generate_trajectories(video, flows, four);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.items[i].id == b.items[i].id);
      REQUIRE(a.items[i].length() == b.items[i].length());
      for (int n = 0; n < a.items[i].length(); ++n) {
        CHECK(a.items[i].points[static_cast<std::size_t>(n)].x ==
              b.items[i].points[static_cast<std::size_t>(n)].x);
        CHECK(a.items[i].points[static_cast<std::size_t>(n)].y ==
              b.items[i].points[static_cast<std::size_t>(n)].y);
      }
    }
  }

  SUBCASE("survival probability stays at or above 0.5 along kept tracks") {
    // Smooth drifting gradient plus slightly inconsistent flow so every step
    // costs energy and tracks die after a handful of frames.
    VideoSequence video;
    const int w = 12, h = 12, frames = 8;
    for (int t = 1; t <= frames; ++t) {
      Image frame(w, h);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const std::uint8_t v = static_cast<std::uint8_t>(x * 4 + y * 3 + t * 2);
          frame.set(x, y, {v, static_cast<std::uint8_t>(v / 2), static_cast<std::uint8_t>(255 - v)});
        }
      }
      video.frames.push_back(std::move(frame));
    }
    auto flows = make_flow_pairs(frames);
    for (int t = 1; t <= frames; ++t) {
      if (t < frames) flows[static_cast<std::size_t>(t)].forward = FlowField(w, h, {0.5f, 0.25f});
      if (t > 1) flows[static_cast<std::size_t>(t)].backward = FlowField(w, h, {-0.45f, -0.25f});
    }
    TrackingConfig cfg;
    cfg.seed_stride = 3;
    const TrackingResult result = generate_trajectories_full(video, flows, cfg);

    auto replay = [&](const Trajectory& traj) {
      double p = 1.0;
      for (std::size_t n = 1; n < traj.points.size(); ++n) {
        const TrajPoint& prev = traj.points[n - 1];
        const TrajPoint& cur = traj.points[n];
        const auto fwd = sample_bilinear(flows[static_cast<std::size_t>(prev.t)].forward, prev.x, prev.y);
        const auto bwd = sample_bilinear(flows[static_cast<std::size_t>(cur.t)].backward, cur.x, cur.y);
        const double e_app =
            cfg.appearance_rescale *
            appearance_energy(video.frame(prev.t), video.frame(cur.t), prev, cur);
        p *= step_probability(e_app, occlusion_energy(fwd, bwd));
        CHECK(p >= 0.5);
      }
    };
    int checked = 0;
    for (const Trajectory& t : result.kept.items) {
      replay(t);
      ++checked;
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("trajectory features") {
  SUBCASE("static trajectory") {
    const VideoSequence video = constant_video(10, 10, 6, {100, 100, 100});
    Trajectory traj;
    for (int t = 1; t <= 6; ++t) traj.points.push_back({5.0f, 5.0f, t});
    const TrajectoryFeatures f = trajectory_features(traj, video, 3);
    CHECK(f.location[0] == doctest::Approx(5.0));
    CHECK(f.location[1] == doctest::Approx(5.0));
    CHECK(f.color[0] == doctest::Approx(100.0));
    CHECK(f.velocity[0] == doctest::Approx(0.0));
    CHECK(f.velocity[1] == doctest::Approx(0.0));
    CHECK(f.start_frame == 1);
    CHECK(f.end_frame == 6);
  }

  SUBCASE("uniform motion gives the exact velocity for any delta_t") {
    const VideoSequence video = constant_video(64, 8, 12, {10, 10, 10});
    Trajectory traj;
    for (int t = 1; t <= 12; ++t) {
      traj.points.push_back({2.0f * static_cast<float>(t), 3.0f, t});
    }
    for (int delta : {1, 3, 5}) {
      const TrajectoryFeatures f = trajectory_features(traj, video, delta);
      CHECK(f.velocity[0] == doctest::Approx(2.0));
      CHECK(f.velocity[1] == doctest::Approx(0.0));
    }
  }

  SUBCASE("velocity equals the brute-force mean over the truncated range") {
    const VideoSequence video = constant_video(64, 64, 10, {10, 10, 10});
    std::mt19937_64 rng(11);
    Trajectory traj;
    for (int t = 1; t <= 10; ++t) {
      traj.points.push_back({static_cast<float>(test::uniform(rng, 0, 63)),
                             static_cast<float>(test::uniform(rng, 0, 63)), t});
    }
    const int delta = 3;
    double vx = 0.0, vy = 0.0;
    for (int n = 0; n < 10 - delta; ++n) {
      vx += (traj.points[static_cast<std::size_t>(n + delta)].x - traj.points[static_cast<std::size_t>(n)].x) / delta;
      vy += (traj.points[static_cast<std::size_t>(n + delta)].y - traj.points[static_cast<std::size_t>(n)].y) / delta;
    }
    vx /= (10 - delta);
    vy /= (10 - delta);
    const TrajectoryFeatures f = trajectory_features(traj, video, delta);
    CHECK(f.velocity[0] == doctest::Approx(vx).epsilon(1e-5));
    CHECK(f.velocity[1] == doctest::Approx(vy).epsilon(1e-5));
  }

  SUBCASE("short trajectory falls back to the endpoint slope") {
    const VideoSequence video = constant_video(32, 8, 4, {10, 10, 10});
    Trajectory traj;
    for (int t = 1; t <= 3; ++t) traj.points.push_back({static_cast<float>(4 * t), 2.0f, t});
    const TrajectoryFeatures f = trajectory_features(traj, video, 3);  // L == delta_t
    CHECK(f.velocity[0] == doctest::Approx(4.0));
  }
}

TEST_CASE("trajectory serialization") {
  SUBCASE("format is exact") {
    TrajectorySet set;
    Trajectory traj;
    traj.id = 3;
    traj.points = {{1.0f, 2.5f, 4}, {1.25f, 2.0f, 5}, {1.5f, 1.5f, 6}, {2.0f, 1.0f, 7}};
    set.items.push_back(traj);

    ScratchDir dir("traj_fmt");
    write_trajectories(dir.file("t.txt"), set);
    std::ifstream in(dir.file("t.txt"));
    std::stringstream buffer;
    buffer << in.rdbuf();
    CHECK(buffer.str() ==
          "3 4 4\n1.000 2.500\n1.250 2.000\n1.500 1.500\n2.000 1.000\n");
  }

  SUBCASE("round trip preserves points to formatting precision") {
    std::mt19937_64 rng(5);
    TrajectorySet set;
    for (int i = 0; i < 20; ++i) {
      Trajectory traj;
      traj.id = i;
      const int start = test::uniform_int(rng, 1, 5);
      const int length = test::uniform_int(rng, 4, 9);
      for (int n = 0; n < length; ++n) {
        traj.points.push_back({static_cast<float>(test::uniform(rng, 0, 99)),
                               static_cast<float>(test::uniform(rng, 0, 49)), start + n});
      }
      set.items.push_back(std::move(traj));
    }
    ScratchDir dir("traj_rt");
    write_trajectories(dir.file("t.txt"), set);
    const TrajectorySet back = read_trajectories(dir.file("t.txt"));
    REQUIRE(back.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
      CHECK(back.items[i].id == set.items[i].id);
      REQUIRE(back.items[i].length() == set.items[i].length());
      CHECK(back.items[i].start_frame() == set.items[i].start_frame());
      for (int n = 0; n < set.items[i].length(); ++n) {
        // %.3f formatting bounds the round-trip error by half a thousandth.
        CHECK(std::abs(back.items[i].points[static_cast<std::size_t>(n)].x -
                       set.items[i].points[static_cast<std::size_t>(n)].x) <= 5.01e-4f);
        CHECK(std::abs(back.items[i].points[static_cast<std::size_t>(n)].y -
                       set.items[i].points[static_cast<std::size_t>(n)].y) <= 5.01e-4f);
      }
    }
  }
}
