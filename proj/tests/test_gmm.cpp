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
#include <random>

#include "supertraj/errors.hpp"
#include "supertraj/gmm.hpp"
#include "supertraj/segmentation.hpp"
#include "test_util.hpp"

using namespace supertraj;

TEST_CASE("separable colors produce a confident posterior") {
  std::vector<std::array<float, 3>> samples;
  std::vector<double> fg_w, bg_w;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 400; ++i) {
    const float jitter = static_cast<float>(test::uniform(rng, -6, 6));
    samples.push_back({250.0f + jitter / 2.0f, 10.0f + jitter, 10.0f});
    fg_w.push_back(1.0);
    bg_w.push_back(0.0);
    samples.push_back({10.0f, 10.0f + jitter, 250.0f + jitter / 2.0f});
    fg_w.push_back(0.0);
    bg_w.push_back(1.0);
  }
  GmmFitOptions options;
  options.components = 3;
  AppearanceModel model;
  model.foreground = fit_weighted_gmm(samples, fg_w, options);
  model.background = fit_weighted_gmm(samples, bg_w, options);

  CHECK(model.posterior({250.0f, 10.0f, 10.0f}) > 0.99);
  CHECK(model.posterior({10.0f, 10.0f, 250.0f}) < 0.01);
}

TEST_CASE("identical data with symmetric weights gives a neutral posterior") {
  std::vector<std::array<float, 3>> samples;
  std::vector<double> w;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    samples.push_back({static_cast<float>(test::uniform(rng, 0, 255)),
                       static_cast<float>(test::uniform(rng, 0, 255)),
                       static_cast<float>(test::uniform(rng, 0, 255))});
    w.push_back(0.5);
  }
  GmmFitOptions options;
  AppearanceModel model;
  model.foreground = fit_weighted_gmm(samples, w, options);
  model.background = fit_weighted_gmm(samples, w, options);  // same seed, same fit
  for (int i = 0; i < 20; ++i) {
    const std::array<float, 3> probe = {static_cast<float>(test::uniform(rng, 0, 255)),
                                        static_cast<float>(test::uniform(rng, 0, 255)),
                                        static_cast<float>(test::uniform(rng, 0, 255))};
    CHECK(model.posterior(probe) == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("weighted EM log-likelihood never decreases") {
  std::vector<std::array<float, 3>> samples;
  std::vector<double> w;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    // Two spread-out lobes so the variance floor never binds.
    const bool lobe = (rng() & 1) != 0;
    const double cx = lobe ? 60.0 : 190.0;
    samples.push_back({static_cast<float>(cx + test::uniform(rng, -40, 40)),
                       static_cast<float>(128 + test::uniform(rng, -50, 50)),
                       static_cast<float>(cx + test::uniform(rng, -40, 40))});
    w.push_back(test::uniform(rng, 0.2, 1.0));
  }
  GmmFitOptions options;
  options.components = 4;
  options.max_iterations = 30;
  options.tolerance = 0.0;  // run all iterations
  std::vector<double> trace;
  fit_weighted_gmm(samples, w, options, &trace);
  REQUIRE(trace.size() >= 10);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    CHECK(trace[i] >= trace[i - 1] - 1e-9 * std::abs(trace[i - 1]));
  }
}

TEST_CASE("no positive weights is a model error") {
  std::vector<std::array<float, 3>> samples = {{1, 2, 3}, {4, 5, 6}};
  std::vector<double> w = {0.0, 0.0};
  CHECK_THROWS_AS(fit_weighted_gmm(samples, w, GmmFitOptions{}), ModelError);
}

TEST_CASE("fit_appearance_model uses cluster probabilities and outside labels") {
  // Two-frame video, left half red (foreground), right half blue. A third
  // color (green) enters via an outside-labeled trajectory and must land in
  // the background model.
  VideoSequence video;
  for (int t = 0; t < 4; ++t) {
    Image frame(24, 8);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 24; ++x) {
        frame.set(x, y, x < 8 ? std::array<std::uint8_t, 3>{240, 20, 20}
                              : (x < 16 ? std::array<std::uint8_t, 3>{20, 20, 240}
                                        : std::array<std::uint8_t, 3>{20, 220, 40}));
      }
    }
    video.frames.push_back(std::move(frame));
  }

  TrajectorySet trajs;
  auto add_traj = [&](float x, float y, int start, int end) {
    Trajectory traj;
    traj.id = static_cast<int>(trajs.size());
    for (int t = start; t <= end; ++t) traj.points.push_back({x, y, t});
    trajs.items.push_back(std::move(traj));
  };
  add_traj(4.0f, 4.0f, 1, 4);   // red
  add_traj(12.0f, 4.0f, 1, 4);  // blue
  add_traj(20.0f, 4.0f, 2, 4);  // green, outside

  TrajectoryLabeling labeling;
  labeling.label = {TrajLabel::foreground, TrajLabel::background, TrajLabel::outside};

  SuperTrajectorySet sts;
  for (int j = 0; j < 3; ++j) {
    SuperTrajectory st;
    st.id = j;
    st.center = j;
    st.members = {j};
    sts.items.push_back(std::move(st));
  }
  const auto probs = supertraj_probabilities(sts, labeling);
  REQUIRE(probs[0].has_value());
  CHECK(*probs[0] == doctest::Approx(1.0));
  CHECK(*probs[2] == doctest::Approx(0.0));

  GmmFitOptions options;
  options.components = 2;
  const AppearanceModel model =
      fit_appearance_model(video, trajs, sts, probs, labeling, options);
  CHECK(model.posterior({240.0f, 20.0f, 20.0f}) > 0.99);
  CHECK(model.posterior({20.0f, 20.0f, 240.0f}) < 0.01);
  CHECK(model.posterior({20.0f, 220.0f, 40.0f}) < 0.01);  // outside -> background
}
