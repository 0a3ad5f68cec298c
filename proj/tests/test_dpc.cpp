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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "supertraj/dpc.hpp"
#include "supertraj/errors.hpp"
#include "reference_dpc.hpp"

using namespace supertraj;
using namespace supertraj::test;

namespace {

constexpr double kH = 1e9;

DistanceMatrix two_point(double dist) {
  DistanceMatrix d(2, kH);
  d.set(0, 1, dist);
  return d;
}

}  // namespace

TEST_CASE("local density examples") {
  SUBCASE("singleton") {
    DistanceMatrix d(1, kH);
    CHECK(local_density(d, DensityMode::literal) == std::vector<double>{0.0});
    CHECK(local_density(d, DensityMode::similarity) == std::vector<double>{0.0});
  }

  SUBCASE("two points at distance 1 in similarity mode") {
    const auto rho = local_density(two_point(1.0), DensityMode::similarity);
    CHECK(rho[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(rho[1] == doctest::Approx(std::exp(-1.0)));
  }

  SUBCASE("sentinel contributes nothing in similarity mode") {
    DistanceMatrix d(3, kH);
    d.set(0, 1, 2.0);
    d.set(0, 2, kH);
    d.set(1, 2, kH);
    const auto rho = local_density(d, DensityMode::similarity);
    CHECK(rho[0] == doctest::Approx(std::exp(-2.0)));
    CHECK(rho[2] == doctest::Approx(0.0));
  }

  SUBCASE("literal mode sums raw rows, sentinel included") {
    DistanceMatrix d(3, kH);
    d.set(0, 1, 2.0);
    d.set(0, 2, kH);
    d.set(1, 2, 3.0);
    const auto rho = local_density(d, DensityMode::literal);
    CHECK(rho[0] == doctest::Approx(2.0 + kH));
    CHECK(rho[1] == doctest::Approx(5.0));
  }

  SUBCASE("matches the brute-force summation on random instances") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      const DistanceMatrix d = random_dpc_instance(rng, 5, kH);
      for (DensityMode mode : {DensityMode::similarity, DensityMode::literal}) {
        const auto rho = local_density(d, mode);
        const auto ref = reference_rho(d, mode);
        for (int i = 0; i < d.n; ++i) {
          CHECK(rho[static_cast<std::size_t>(i)] ==
                doctest::Approx(ref[static_cast<std::size_t>(i)]));
        }
      }
    }
  }
}

TEST_CASE("delta distance examples") {
  SUBCASE("two points") {
    const DistanceMatrix d = two_point(3.0);
    const std::vector<double> rho = {2.0, 1.0};
    const auto delta = delta_distance(d, rho);
    CHECK(delta[0] == doctest::Approx(3.0));  // densest takes the row max
    CHECK(delta[1] == doctest::Approx(3.0));
  }

  SUBCASE("unreachable items sit at the sentinel") {
    DistanceMatrix d(3, kH);
    d.set(0, 1, 1.0);
    d.set(0, 2, kH);
    d.set(1, 2, kH);
    const std::vector<double> rho = {3.0, 2.0, 1.0};
    const auto delta = delta_distance(d, rho);
    CHECK(delta[2] == kH);
  }

  SUBCASE("matches the exhaustive oracle on random instances") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
      const DistanceMatrix d = random_dpc_instance(rng, 8, kH);
      const auto rho = local_density(d, DensityMode::similarity);
      const auto delta = delta_distance(d, rho);
      const auto ref = reference_delta(d, rho);
      for (int i = 0; i < d.n; ++i) {
        CHECK(delta[static_cast<std::size_t>(i)] ==
              doctest::Approx(ref[static_cast<std::size_t>(i)]));
      }
    }
  }
}

TEST_CASE("select_centers") {
  SUBCASE("singleton") {
    DistanceMatrix d(1, kH);
    CHECK(select_centers(d, 1, DensityMode::similarity) == std::vector<int>{0});
  }

  SUBCASE("requesting zero centers is a contract violation") {
    DistanceMatrix d(2, kH);
    CHECK_THROWS_AS(select_centers(d, 0, DensityMode::similarity), ContractError);
  }

  SUBCASE("two temporally disjoint groups override a smaller request") {
    // Items 0-2 overlap each other, items 3-5 overlap each other, and the
    // groups never overlap. In-group distances are distinct so each group
    // has a unique density peak.
    DistanceMatrix d(6, kH);
    d.set(0, 1, 0.2);
    d.set(0, 2, 0.5);
    d.set(1, 2, 0.9);
    d.set(3, 4, 0.3);
    d.set(3, 5, 0.6);
    d.set(4, 5, 1.0);
    for (int i = 0; i < 3; ++i) {
      for (int j = 3; j < 6; ++j) d.set(i, j, kH);
    }
    const auto centers = select_centers(d, 1, DensityMode::similarity);
    REQUIRE(centers.size() == 2);
    // The density peak of each group.
    CHECK(std::count(centers.begin(), centers.end(), 0) == 1);
    CHECK(std::count(centers.begin(), centers.end(), 3) == 1);
  }

  SUBCASE("count capped at n") {
    DistanceMatrix d(3, kH);
    d.set(0, 1, 1.0);
    d.set(0, 2, 2.0);
    d.set(1, 2, 1.5);
    CHECK(select_centers(d, 10, DensityMode::similarity).size() == 3);
  }

  SUBCASE("matches the brute-force gamma ranking on random instances") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
      const DistanceMatrix d = random_dpc_instance(rng, 10, kH);
      for (DensityMode mode : {DensityMode::similarity, DensityMode::literal}) {
        for (int c : {1, 3}) {
          CHECK(select_centers(d, c, mode) == reference_select_centers(d, c, mode));
        }
      }
    }
  }

  SUBCASE("all-finite distinct instance with C=1 returns the gamma maximizer") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      DistanceMatrix d(6, kH);
      for (int i = 0; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) d.set(i, j, uniform(rng, 0.1, 5.0));
      }
      const DpcScores s = dpc_scores(d, DensityMode::similarity);
      const int best = static_cast<int>(std::max_element(s.gamma.begin(), s.gamma.end()) -
                                        s.gamma.begin());
      CHECK(select_centers(d, 1, DensityMode::similarity) == std::vector<int>{best});
    }
  }
}

TEST_CASE("assign_members") {
  SUBCASE("single center captures everything reachable") {
    DistanceMatrix d(4, kH);
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) d.set(i, j, 1.0 + i + j);
    }
    const auto rho = local_density(d, DensityMode::similarity);
    const auto centers = select_centers(d, 1, DensityMode::similarity);
    const ClusterAssignment a = assign_members(d, rho, centers);
    for (int i = 0; i < 4; ++i) CHECK(a.label[static_cast<std::size_t>(i)] == centers[0]);
  }

  SUBCASE("chain inheritance walks through denser neighbors") {
    // rho_a > rho_b > rho_c with a-b and b-c close, a-c far.
    DistanceMatrix d(3, kH);
    d.set(0, 1, 1.0);
    d.set(1, 2, 1.0);
    d.set(0, 2, 8.0);
    const std::vector<double> rho = {3.0, 2.0, 1.0};
    const ClusterAssignment a = assign_members(d, rho, {0});
    CHECK(a.label[0] == 0);
    CHECK(a.label[1] == 0);
    CHECK(a.label[2] == 0);  // inherits through b
  }

  SUBCASE("labels always point at centers") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 40; ++trial) {
      const DistanceMatrix d = random_dpc_instance(rng, 12, kH);
      const auto rho = local_density(d, DensityMode::similarity);
      const auto centers = select_centers(d, 2, DensityMode::similarity);
      const ClusterAssignment a = assign_members(d, rho, centers);
      for (int i = 0; i < d.n; ++i) {
        CHECK(std::find(a.centers.begin(), a.centers.end(),
                        a.label[static_cast<std::size_t>(i)]) != a.centers.end());
      }
      for (int c : centers) CHECK(a.label[static_cast<std::size_t>(c)] == c);
    }
  }

  SUBCASE("matches the reference inheritance rule on random instances") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 60; ++trial) {
      const DistanceMatrix d = random_dpc_instance(rng, 12, kH);
      for (DensityMode mode : {DensityMode::similarity, DensityMode::literal}) {
        const auto rho = local_density(d, mode);
        const auto centers = select_centers(d, 2, mode);
        const ClusterAssignment a = assign_members(d, rho, centers);
        CHECK(a.label == reference_assign(d, rho, centers));
      }
    }
  }
}

TEST_CASE("dpc properties") {
  SUBCASE("index equivariance under permutation") {
    std::mt19937_64 rng(43);
    const DistanceMatrix d = random_dpc_instance(rng, 9, kH);
    std::vector<int> perm(9);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    DistanceMatrix p(9, kH);
    for (int i = 0; i < 9; ++i) {
      for (int j = 0; j < 9; ++j) {
        p.set(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)], d.at(i, j));
      }
    }
    const auto rho_d = local_density(d, DensityMode::similarity);
    const auto rho_p = local_density(p, DensityMode::similarity);
    const auto delta_d = delta_distance(d, rho_d);
    const auto delta_p = delta_distance(p, rho_p);
    for (int i = 0; i < 9; ++i) {
      CHECK(rho_p[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] ==
            doctest::Approx(rho_d[static_cast<std::size_t>(i)]));
    }
    // Delta permutes too when densities are distinct (no tie-break effects).
    bool distinct = true;
    for (int i = 0; i < 9 && distinct; ++i) {
      for (int j = i + 1; j < 9; ++j) {
        if (rho_d[static_cast<std::size_t>(i)] == rho_d[static_cast<std::size_t>(j)]) {
          distinct = false;
          break;
        }
      }
    }
    if (distinct) {
      for (int i = 0; i < 9; ++i) {
        CHECK(delta_p[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] ==
              doctest::Approx(delta_d[static_cast<std::size_t>(i)]));
      }
    }
  }

  SUBCASE("a fully isolated extra item never changes similarity densities") {
    std::mt19937_64 rng(47);
    DistanceMatrix d(5, kH);
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) d.set(i, j, uniform(rng, 0.1, 4.0));
    }
    DistanceMatrix bigger(6, kH);
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) bigger.set(i, j, d.at(i, j));
      bigger.set(i, 5, kH);
    }
    const auto rho_small = local_density(d, DensityMode::similarity);
    const auto rho_big = local_density(bigger, DensityMode::similarity);
    for (int i = 0; i < 5; ++i) {
      CHECK(rho_big[static_cast<std::size_t>(i)] ==
            doctest::Approx(rho_small[static_cast<std::size_t>(i)]));
    }
  }

  SUBCASE("center count is always between 1 and n") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = uniform_int(rng, 1, 10);
      const DistanceMatrix d = random_dpc_instance(rng, n, kH);
      const int c = uniform_int(rng, 1, 12);
      const auto centers = select_centers(d, c, DensityMode::similarity);
      CHECK(centers.size() >= 1);
      CHECK(centers.size() <= static_cast<std::size_t>(n));
    }
  }
}
