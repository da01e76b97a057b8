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

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "ionlearn/datagen.hpp"
#include "ionlearn/error.hpp"
#include "ionlearn/rng.hpp"
#include "ionlearn/wavepacket.hpp"

using namespace ionlearn;
using std::numbers::pi;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

EvolutionMatrix random_symplectic(Rng& rng) {
  // Shear * rotation * squeeze, each with unit determinant.
  const double s = rng.uniform(-2, 2), phi = rng.uniform(0, 2 * pi), r = std::exp(rng.uniform(-1, 1));
  const EvolutionMatrix shear{1.0, s, 0.0, 1.0, 0, 0};
  const EvolutionMatrix rot{std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi), 0, 0};
  const EvolutionMatrix sq{r, 0.0, 0.0, 1.0 / r, 0, 0};
  return compose(shear, compose(rot, sq));
}

}  // namespace

TEST_CASE("gaussian state validation") {
  CHECK_NOTHROW(GaussianState{}.validate());
  CHECK_THROWS_AS((GaussianState{{0, 0}, {0.4, 0.0, 0.5}}.validate()), Error);  // det 0.2
  CHECK_THROWS_AS((GaussianState{{0, 0}, {-1.0, 0.0, -1.0}}.validate()), Error);
  CHECK_THROWS_AS((GaussianState{{0, 0}, {1.0, 2.0, 1.0}}.validate()), Error);
  CHECK_THROWS_AS(propagate_gaussian(GaussianState{{0, 0}, {1.0, 2.0, 1.0}}, EvolutionMatrix::identity(0)), Error);
}

TEST_CASE("propagation examples") {
  const GaussianState s{{0.3, -1.2}, {0.8, 0.1, 0.4}};
  const auto same = propagate_gaussian(s, EvolutionMatrix::identity(0.0));
  CHECK(same.mean.x == s.mean.x);
  CHECK(same.mean.p == s.mean.p);
  CHECK(same.cov == s.cov);

  // beta = 1 over a quarter period rotates (x, p) -> (p, -x).
  const auto path = integrate_cauchy(ElasticField::constant(1.0), 0.0, pi / 2, 2000);
  const auto q = propagate_gaussian(s, path.back());
  CHECK(q.cov[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(q.cov[2] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(q.cov[1] == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(q.mean.x == doctest::Approx(-1.2).epsilon(1e-12));
  CHECK(q.mean.p == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("determinant conservation and composition under random symplectic maps") {
  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const auto u1 = random_symplectic(rng), u2 = random_symplectic(rng);
    const auto min = GaussianState::minimum_uncertainty({rng.uniform(-2, 2), rng.uniform(-2, 2)});
    const auto out = propagate_gaussian(min, u1);
    CHECK(std::abs(out.cov_det() - 0.25) <= 1e-10);

    const GaussianState s{{rng.uniform(-1, 1), rng.uniform(-1, 1)}, {0.9, 0.2, 0.7}};
    const auto seq = propagate_gaussian(propagate_gaussian(s, u1), u2);
    const auto once = propagate_gaussian(s, compose(u2, u1));
    for (int k = 0; k < 3; ++k) {
      CHECK(seq.cov[static_cast<std::size_t>(k)] ==
            doctest::Approx(once.cov[static_cast<std::size_t>(k)]).epsilon(1e-12));
    }
    CHECK(seq.mean.x == doctest::Approx(once.mean.x).epsilon(1e-12));
    CHECK(seq.mean.p == doctest::Approx(once.mean.p).epsilon(1e-12));
  }
}

TEST_CASE("density values and normalization") {
  const auto s = GaussianState::minimum_uncertainty({1.0, 1.0});
  CHECK(density(s, 1.0) == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-15));
  CHECK(density(s, 1.0) == doctest::Approx(0.5641895835).epsilon(1e-10));
  CHECK(std::abs(density_mass(s) - 1.0) <= 1e-6);

  // Across the full four-wave evolution the packet stays normalized and
  // keeps det = 1/4.
  const auto path = integrate_cauchy(ElasticField::four_wave(), -2 * pi, 2 * pi, 4000);
  double worst_det = 0.0, worst_mass = 0.0;
  for (std::size_t k = 0; k < path.size(); k += 40) {
    const auto st = propagate_gaussian(s, path[k]);
    worst_det = std::max(worst_det, std::abs(st.cov_det() - 0.25));
    worst_mass = std::max(worst_mass, std::abs(density_mass(st) - 1.0));
  }
  CHECK(worst_det <= 1e-10);
  CHECK(worst_mass <= 1e-6);
}

TEST_CASE("density at the end of a loop equals the initial density") {
  // beta = 1 over a full period is an identity loop.
  const auto s = GaussianState{{0.5, -0.2}, {0.7, 0.1, 0.5}};
  const auto u = integrate_cauchy(ElasticField::constant(1.0), 0.0, 2 * pi, 4000).back();
  const auto end = propagate_gaussian(s, u);
  for (double x = -3.0; x <= 3.0; x += 0.25) CHECK(std::abs(density(end, x) - density(s, x)) <= 1e-9);
}

TEST_CASE("density datasets") {
  DensitySpec spec;
  const auto xs = linspace(-6, 6, 50);
  const auto ts = TimeGrid::uniform(-2 * pi, 2 * pi, 50);
  const auto ds = make_density_dataset(spec, xs, ts);
  CHECK(ds.size() == 2500);
  CHECK(ds.has_x_coord());
  CHECK(ds.count(Split::Train) == 2000);
  CHECK(ds.provenance.covariance.has_value());

  spec.noise_fraction = 0.1;
  spec.seed = 3;
  std::ostringstream a, b;
  write_dataset_csv(make_density_dataset(spec, xs, ts), a);
  write_dataset_csv(make_density_dataset(spec, xs, ts), b);
  CHECK(a.str() == b.str());

  // A single time: rows equal the analytic density of the propagated state.
  DensitySpec one;
  one.field = ElasticField::constant(1.0);
  one.interval = {0.0, 1.0};
  const auto single = make_density_dataset(one, xs, TimeGrid(std::vector<double>{1.0}));
  const auto st = propagate_gaussian(one.state0, integrate_cauchy(one.field, 0.0, 1.0, 4000).back());
  for (const auto& r : single.records) CHECK(r.target == doctest::Approx(density(st, *r.x_coord)).epsilon(1e-9));

  const std::vector<double> bad{0.0, 0.0, 1.0};
  CHECK_THROWS_AS(make_density_dataset(spec, bad, ts), Error);
}

TEST_CASE("predicted density uses the closed-form top row") {
  const auto s = GaussianState::minimum_uncertainty({1.0, 1.0});
  const ThetaAnsatz th({1.0});
  for (double t : {-2.0, 0.0, 0.7, 3.0}) {
    const EvolutionMatrix u{std::cos(t), std::sin(t), -std::sin(t), std::cos(t), t, 0.0};
    const auto ref = propagate_gaussian(s, u);
    for (double x : {-1.0, 0.2, 1.5}) CHECK(predict_density(th, s, t, x) == doctest::Approx(density(ref, x)).epsilon(1e-12));
  }
}

TEST_CASE("density regression recovers a single coefficient") {
  DensitySpec spec;
  spec.field = ElasticField::constant(1.0);
  spec.noise_fraction = 0.0;
  const auto ds = make_density_dataset(spec, linspace(-5, 5, 30), TimeGrid::uniform(-2 * pi, 2 * pi, 30));
  OptimizerConfig cfg;
  cfg.seed = 2;
  const auto rep = fit_density_regression(ds, cfg, 1);
  CHECK(rep.task == Task::Density);
  CHECK(std::abs(rep.best_params[0] - 1.0) <= 0.05);
  CHECK(rep.covariance.has_value());

  OptimizerConfig design;
  design.budget = design.init_points = 10;
  const auto d = fit_density_regression(ds, design, 1);
  CHECK(d.iterations_run == 10);

  Dataset no_x = ds;
  for (auto& r : no_x.records) r.x_coord.reset();
  CHECK_THROWS_AS(fit_density_regression(no_x, cfg, 1), Error);
  CHECK_THROWS_AS(fit_density_regression(ds, cfg, 0), Error);
}
