// Copyright 2026 The ionlearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ionlearn/error.hpp"
#include "ionlearn/gaussian_process.hpp"
#include "ionlearn/optimize.hpp"
#include "ionlearn/rng.hpp"
#include "oracle.hpp"

using namespace ionlearn;

namespace {

double bowl(std::span<const double> a) {
  static const double target[] = {0.7, -1.1, 0.4};
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - target[d]) * (a[d] - target[d]);
  return s;
}

void check_trace_invariants(const OptimizationTrace& tr, const ParameterSpace& space, const OptimizerConfig& cfg) {
  REQUIRE(!tr.evaluations.empty());
  CHECK(tr.evaluations.size() <= cfg.budget);
  double running = tr.evaluations.front().cost;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < tr.evaluations.size(); ++i) {
    CHECK(space.contains(tr.evaluations[i].params));
    if (tr.evaluations[i].cost < running) {
      running = tr.evaluations[i].cost;
      arg = i;
    }
  }
  CHECK(tr.best_index == arg);
  CHECK(tr.best().cost == running);
}

}  // namespace

TEST_CASE("expected improvement closed form") {
  CHECK(expected_improvement(1.0, 0.0, 1.0) == 0.0);
  CHECK(expected_improvement(2.0, 0.0, 1.0) == 0.0);
  CHECK(expected_improvement(0.25, 0.0, 1.0) == 0.75);
  CHECK(expected_improvement(0.0, 1.0, 0.0) == doctest::Approx(oracle::phi(0.0)).epsilon(1e-14));
  CHECK(expected_improvement(0.0, 1.0, 0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  for (double mu : {-1.3, 0.2, 0.9}) {
    for (double sigma : {0.1, 0.7, 2.0}) {
      const double z = (0.5 - mu) / sigma;
      const double ref = (0.5 - mu) * oracle::Phi(z) + sigma * oracle::phi(z);
      CHECK(expected_improvement(mu, sigma, 0.5) == doctest::Approx(ref).epsilon(1e-12));
    }
  }
  double prev = expected_improvement(-3.0, 0.8, 0.0);
  for (double mu = -2.9; mu <= 3.0; mu += 0.1) {
    const double ei = expected_improvement(mu, 0.8, 0.0);
    CHECK(ei >= 0.0);
    CHECK(ei <= prev);
    prev = ei;
  }
}

TEST_CASE("latin hypercube stratifies every dimension") {
  const ParameterSpace space{{-2.0, 0.0, 10.0}, {2.0, 1.0, 20.0}};
  Rng rng(4);
  const std::size_t n = 12;
  const auto pts = latin_hypercube(space, n, rng);
  REQUIRE(pts.size() == n);
  for (std::size_t d = 0; d < 3; ++d) {
    std::vector<int> seen(n, 0);
    for (const auto& p : pts) {
      CHECK(space.contains(p));
      const double u = (p[d] - space.lower[d]) / (space.upper[d] - space.lower[d]);
      ++seen[std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)))];
    }
    for (int s : seen) CHECK(s == 1);
  }
}

TEST_CASE("gaussian process interpolates its observations") {
  Rng rng(8);
  const int n = 15;
  Eigen::MatrixXd pts(2, n);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    pts(0, i) = rng.uniform();
    pts(1, i) = rng.uniform();
    y(i) = std::sin(3 * pts(0, i)) + pts(1, i) * pts(1, i);
  }
  y = (y.array() - y.mean()) / std::sqrt((y.array() - y.mean()).square().mean());
  const double jitter = 1e-6;
  GaussianProcess gp(pts, y, Eigen::VectorXd::Constant(2, 0.2), 1.0, jitter);
  REQUIRE(gp.ok());
  Eigen::VectorXd mean, sd;
  gp.predict(pts, mean, sd);
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(mean(i) - y(i)) <= 3.0 * std::sqrt(jitter));
    CHECK(sd(i) >= 0.0);
    CHECK(sd(i) <= 3.0 * std::sqrt(jitter));
  }
  Eigen::MatrixXd far(2, 1);
  far << 50.0, 50.0;
  gp.predict(far, mean, sd);
  CHECK(std::abs(mean(0)) < 1e-9);
  CHECK(sd(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("configuration validation") {
  OptimizerConfig c;
  c.budget = 5;
  c.init_points = 10;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.patience = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.init_points = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK_THROWS_AS(ParameterSpace::box(2, 1.0, 1.0), Error);
  CHECK_THROWS_AS((ParameterSpace{{0.0}, {1.0, 2.0}}.validate()), Error);
}

TEST_CASE("bayes_minimize on a quadratic bowl") {
  const auto space = ParameterSpace::box(3, -2.0, 2.0);
  OptimizerConfig cfg;
  cfg.budget = 60;
  cfg.seed = 1;
  const auto tr = bayes_minimize(bowl, space, cfg);
  check_trace_invariants(tr, space, cfg);
  CHECK(tr.best().cost <= 0.01);
  const auto& a = tr.best().params;
  CHECK(std::abs(a[0] - 0.7) <= 0.1);
  CHECK(std::abs(a[1] + 1.1) <= 0.1);
  CHECK(std::abs(a[2] - 0.4) <= 0.1);

  const auto again = bayes_minimize(bowl, space, cfg);
  REQUIRE(again.evaluations.size() == tr.evaluations.size());
  for (std::size_t i = 0; i < tr.evaluations.size(); ++i) {
    CHECK(again.evaluations[i].params == tr.evaluations[i].params);
    CHECK(again.evaluations[i].cost == tr.evaluations[i].cost);
  }
}

TEST_CASE("degenerate budgets and constant objectives") {
  const auto space = ParameterSpace::box(2, -1.0, 1.0);
  OptimizerConfig cfg;
  cfg.budget = cfg.init_points = 6;
  const auto design = bayes_minimize(bowl, space, cfg);
  CHECK(design.evaluations.size() == 6);
  CHECK(design.stop_reason == StopReason::Budget);
  Rng rng(derive_seed(cfg.seed, 11));
  const auto lhs = latin_hypercube(space, 6, rng);
  for (std::size_t i = 0; i < 6; ++i) CHECK(design.evaluations[i].params == lhs[i]);

  OptimizerConfig flat_cfg;
  const auto flat = bayes_minimize([](std::span<const double>) { return 3.0; }, space, flat_cfg);
  CHECK(flat.stop_reason == StopReason::Patience);
  CHECK(flat.evaluations.size() == flat_cfg.patience + 1);
  CHECK(flat.best_index == 0);

  OptimizerConfig one;
  one.budget = 1;
  one.init_points = 1;
  const auto single = random_search(bowl, space, one);
  CHECK(single.evaluations.size() == 1);

  CHECK_THROWS_AS(bayes_minimize([](std::span<const double>) { return std::nan(""); }, space, flat_cfg), Error);
}

TEST_CASE("patience resets only on a significant improvement") {
  // Costs decrease by 5e-5 per call: never more than min_improvement 1e-4.
  const auto space = ParameterSpace::box(1, 0.0, 1.0);
  OptimizerConfig cfg;
  cfg.method = Method::Random;
  cfg.init_points = 1;
  cfg.patience = 5;
  int calls = 0;
  const auto tr = random_search([&](std::span<const double>) { return 1.0 - 5e-5 * calls++; }, space, cfg);
  CHECK(tr.stop_reason == StopReason::Patience);
  CHECK(tr.evaluations.size() == 6);
  CHECK(tr.best_index == 5);

  calls = 0;
  const auto steep = random_search([&](std::span<const double>) { return 1.0 - 2e-4 * calls++; }, space, cfg);
  CHECK(steep.stop_reason == StopReason::Budget);
  CHECK(steep.evaluations.size() == cfg.budget);
}

TEST_CASE("random search") {
  const auto space = ParameterSpace::box(3, -2.0, 2.0);
  OptimizerConfig cfg;
  cfg.method = Method::Random;
  cfg.seed = 3;
  const auto a = random_search(bowl, space, cfg);
  const auto b = minimize(bowl, space, cfg);
  check_trace_invariants(a, space, cfg);
  REQUIRE(a.evaluations.size() == b.evaluations.size());
  for (std::size_t i = 0; i < a.evaluations.size(); ++i) CHECK(a.evaluations[i].params == b.evaluations[i].params);

  // 500 samples, best cost within 0.3 of the optimal value 0 over 20 seeds.
  // A single draw lands in that ball (radius sqrt(0.3), inside the box) with
  // probability q, so each seed succeeds with 1 - (1 - q)^500 > 0.99.
  const double q = 4.0 / 3.0 * std::numbers::pi * std::pow(0.3, 1.5) / 64.0;
  CHECK(1.0 - std::pow(1.0 - q, 500) > 0.99);
  cfg.budget = 500;
  cfg.patience = 500;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.seed = seed;
    const auto tr = random_search(bowl, space, cfg);
    CHECK(tr.evaluations.size() == 500);
    if (tr.best().cost <= 0.3) ++hits;
  }
  CHECK(hits >= 19);
}
