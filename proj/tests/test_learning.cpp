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
#include <functional>
#include <numbers>
#include <vector>

#include "ionlearn/datagen.hpp"
#include "ionlearn/error.hpp"
#include "ionlearn/learning.hpp"
#include "ionlearn/rng.hpp"

using namespace ionlearn;
using std::numbers::pi;

namespace {

Dataset toy(const std::function<double(double)>& f, CanonicalPair q0, bool labels, std::size_t n = 200) {
  Dataset ds;
  ds.provenance.q0 = q0;
  ds.provenance.interval = {-2 * pi, 2 * pi};
  const auto grid = TimeGrid::uniform(-2 * pi, 2 * pi, n);
  for (double t : grid.nodes()) {
    Record r;
    r.t = t;
    r.target = f(t);
    if (labels) r.label = r.target >= 0.0 ? 1 : 0;
    ds.records.push_back(r);
  }
  return split_dataset(std::move(ds), 0.8, 5);
}

void check_same_report(const FitReport& a, const FitReport& b) {
  CHECK(a.best_params == b.best_params);
  CHECK(a.iterations_run == b.iterations_run);
  CHECK(a.stop_reason == b.stop_reason);
  CHECK(a.history == b.history);
  CHECK(a.train_metrics.values == b.train_metrics.values);
  CHECK(a.test_metrics.values == b.test_metrics.values);
}

}  // namespace

TEST_CASE("position and momentum predictions") {
  const RegressionModel sine{ThetaAnsatz({1.0}), {1.0, 0.0}};
  CHECK(predict_position(sine, 0.0) == 1.0);
  CHECK(predict_momentum(sine, 0.0) == 0.0);
  const RegressionModel sine_p{ThetaAnsatz({1.0}), {0.0, 1.0}};
  CHECK(predict_position(sine_p, pi / 2) == doctest::Approx(1.0).epsilon(1e-15));

  // theta = sin(w t) / w in the det-1 matrix mode gives the oscillator momentum.
  for (double w : {0.5, 1.0, 2.0}) {
    const RegressionModel m{ThetaAnsatz({1.0 / w}, w), {1.0, 0.0}, MomentumMode::MatrixDet1};
    for (double t : {0.3, 1.1, 2.0}) {
      CHECK(predict_momentum(m, t) == doctest::Approx(-w * std::sin(w * t)).epsilon(1e-12));
      CHECK(predict_position(m, t) == doctest::Approx(std::cos(w * t)).epsilon(1e-12));
    }
  }
  const RegressionModel halved_mode{ThetaAnsatz({1.0}), {1.0, 0.0}, MomentumMode::MatrixHalved};
  CHECK(predict_momentum(halved_mode, 1.0) == doctest::Approx(-0.5 * std::sin(1.0)).epsilon(1e-12));

  const RegressionModel bad{ThetaAnsatz({2.0}), {1.0, 0.0}, MomentumMode::MatrixDet1};
  CHECK_THROWS_AS(predict_momentum(bad, 0.0), Error);
}

TEST_CASE("position model is linear in q0") {
  Rng rng(2);
  const ThetaAnsatz th({0.9, -0.2, 0.07});
  for (int rep = 0; rep < 50; ++rep) {
    const CanonicalPair a{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const CanonicalPair b{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const double c = rng.uniform(-3, 3);
    const double t = rng.uniform(-6, 6);
    const double lhs = predict_position({th, {a.x + c * b.x, a.p + c * b.p}}, t);
    const double rhs = predict_position({th, a}, t) + c * predict_position({th, b}, t);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("derivative-mode momentum is the time derivative of the position") {
  const RegressionModel m{ThetaAnsatz({0.8, 0.3, -0.1}), {1.0, 1.0}};
  const double h = 1e-4;
  for (double t = -6.0; t <= 6.0; t += 0.1) {
    const double fd = (predict_position(m, t + h) - predict_position(m, t - h)) / (2 * h);
    CHECK(std::abs(predict_momentum(m, t) - fd) <= 1e-6);
  }
}

TEST_CASE("regression cost") {
  Dataset ds;
  ds.records = {{0.0, {}, 1.0, {}, Split::Train}, {1.0, {}, -1.0, {}, Split::Train}};
  ds.provenance.q0 = {0.0, 0.0};
  CHECK(regression_cost({ThetaAnsatz({1.0}), {0.0, 0.0}}, ds) == 1.0);
  const auto sine = toy([](double t) { return std::sin(t); }, {0.0, 1.0}, false);
  CHECK(regression_cost({ThetaAnsatz({1.0}), {0.0, 1.0}}, sine) < 1e-30);
  CHECK_THROWS_AS(regression_cost({ThetaAnsatz({1.0}), {0.0, 1.0}}, ds, SplitSelector::Test), Error);
}

TEST_CASE("sigmoid, probabilities and labels") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) >= 0.0);
  double prev = 0.0;
  for (double xi = -30.0; xi <= 30.0; xi += 0.5) {
    const double p = sigmoid(xi);
    CHECK(p > prev);
    CHECK(sigmoid(-xi) == doctest::Approx(1.0 - p).epsilon(1e-12));
    prev = p;
  }
  ClassifierModel m{ThetaAnsatz({1.0}), {0.0, 1.0}};
  CHECK(class_probability(m, 0.0) == 0.5);
  CHECK(predict_label(m, 0.0) == 1);
  m.threshold = 0.51;
  CHECK(predict_label(m, 0.0) == 0);
  m.calibration = Calibration{2.0, 0.5};
  CHECK(class_score(m, pi / 2) == doctest::Approx(2.5).epsilon(1e-14));

  // A larger threshold never turns a 0 into a 1.
  ClassifierModel k{ThetaAnsatz({0.7, 0.2}), {1.0, 1.0}};
  for (double t = -6.0; t <= 6.0; t += 0.37) {
    int last = 1;
    for (double thr = 0.05; thr < 1.0; thr += 0.05) {
      k.threshold = thr;
      const int lab = predict_label(k, t);
      CHECK(lab <= last);
      last = lab;
    }
  }
}

TEST_CASE("binary cross entropy") {
  CHECK(binary_cross_entropy(std::vector<int>{1}, std::vector<double>{0.5}) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-15));
  const std::vector<int> y{1, 0, 1, 1, 0, 0, 1};
  const std::vector<double> half(y.size(), 0.5);
  CHECK(binary_cross_entropy(y, half) == doctest::Approx(7.0 * std::log(2.0)).epsilon(1e-15));
  std::vector<double> perfect;
  for (int v : y) perfect.push_back(v);
  CHECK(binary_cross_entropy(y, perfect) <= 7.0 * 1e-11);
  CHECK_THROWS_AS(binary_cross_entropy(y, std::vector<double>{0.5}), Error);
}

TEST_CASE("label swap with xi -> -xi leaves the cost invariant") {
  auto ds = toy([](double t) { return std::sin(t) + 0.3 * std::cos(3 * t); }, {1.0, 1.0}, true);
  auto swapped = ds;
  for (auto& r : swapped.records) r.label = 1 - *r.label;
  const ThetaAnsatz th({0.6, -0.25});
  const ClassifierModel m{th, {1.0, 1.0}};
  const ClassifierModel neg{ThetaAnsatz({-0.6, 0.25}), {1.0, 1.0}};
  CHECK(classification_cost(m, ds) == doctest::Approx(classification_cost(neg, swapped)).epsilon(1e-12));
  Dataset unlabeled = toy([](double t) { return t; }, {1.0, 1.0}, false);
  CHECK_THROWS_AS(classification_cost(m, unlabeled), Error);
}

TEST_CASE("regression fit recovers a single harmonic") {
  const auto ds = toy([](double t) { return std::sin(t); }, {0.0, 1.0}, false);
  // Full budget: the default patience stops around 30 evaluations at a cost
  // near 5e-3, before the coefficients settle.
  OptimizerConfig cfg;
  cfg.seed = 4;
  cfg.patience = cfg.budget;
  const auto rep = fit_regression(ds, cfg, 3);
  CHECK(rep.stop_reason == StopReason::Budget);
  CHECK(std::abs(rep.best_params[0] - 1.0) < 0.02);
  CHECK(std::abs(rep.best_params[1]) < 0.02);
  CHECK(std::abs(rep.best_params[2]) < 0.02);
  CHECK(*rep.test_metrics.get("r2") > 0.999);
  CHECK(rep.iterations_run == rep.history.size());
  double lowest = rep.history.front().second;
  for (const auto& [i, c] : rep.history) lowest = std::min(lowest, c);
  CHECK(rep.best_cost == lowest);
  CHECK(regression_cost(regression_model(rep), ds) == doctest::Approx(lowest).epsilon(1e-12));

  check_same_report(rep, fit_regression(ds, cfg, 3));

  OptimizerConfig design;
  design.budget = design.init_points = 10;
  const auto d = fit_regression(ds, design, 3);
  CHECK(d.iterations_run == 10);
  CHECK(d.stop_reason == StopReason::Budget);
  CHECK_THROWS_AS(fit_regression(ds, cfg, 0), Error);
  Dataset unsplit = ds;
  for (auto& r : unsplit.records) r.split.reset();
  CHECK_THROWS_AS(fit_regression(unsplit, cfg, 1), Error);
}

TEST_CASE("admissibility penalty steers the fit") {
  // Target 1.5 sin t is inadmissible (slope 1.5 at the zeros); the penalty
  // pulls the fit towards slope 1.
  const auto ds = toy([](double t) { return 1.5 * std::sin(t); }, {0.0, 1.0}, false);
  OptimizerConfig cfg;
  FitOptions plain, penal;
  penal.admissibility_penalty = 10.0;
  const auto a = fit_regression(ds, cfg, 1, plain);
  const auto b = fit_regression(ds, cfg, 1, penal);
  CHECK(a.best_params[0] == doctest::Approx(1.5).epsilon(0.02));
  CHECK(!a.theta_validity.admissible);
  CHECK(std::abs(b.best_params[0] - 1.0) < std::abs(a.best_params[0] - 1.0));
}

TEST_CASE("classifier on separable labels") {
  const auto ds = toy([](double t) { return std::sin(t); }, {0.0, 1.0}, true);
  OptimizerConfig cfg;
  const auto rep = fit_classifier(ds, cfg, 3);
  CHECK(*rep.train_metrics.get("auc") >= 0.999);
  CHECK(rep.train_metrics.confusion.has_value());
  CHECK(rep.best_cost < static_cast<double>(ds.count(Split::Train)) * std::log(2.0));
  check_same_report(rep, fit_classifier(ds, cfg, 3));

  FitOptions cal;
  cal.calibrate = true;
  const auto rc = fit_classifier(ds, cfg, 2, cal);
  REQUIRE(rc.calibration.has_value());
  CHECK(rc.calibration->scale >= cal.scale_lower);
  CHECK(rc.calibration->scale <= cal.scale_upper);
  CHECK(rc.best_params.size() == 2);

  auto one_class = ds;
  for (auto& r : one_class.records) r.label = 1;
  CHECK_THROWS_AS(fit_classifier(one_class, cfg, 3), Error);
}

TEST_CASE("multiclass reductions") {
  const auto f = [](double t) { return std::sin(t) + 0.2 * std::sin(3 * t); };
  Dataset ds;
  ds.provenance.q0 = {0.0, 1.0};
  ds.provenance.interval = {-2 * pi, 2 * pi};
  std::vector<double> values;
  const auto grid = TimeGrid::uniform(-2 * pi, 2 * pi, 150);
  for (double t : grid.nodes()) {
    ds.records.push_back({t, {}, f(t), {}, {}});
    values.push_back(f(t));
  }
  const auto bands = label_by_quantiles(values, 3);
  for (std::size_t i = 0; i < bands.size(); ++i) ds.records[i].label = bands[i];
  ds = split_dataset(std::move(ds), 0.8, 2);

  OptimizerConfig cfg;
  cfg.budget = 40;
  const auto ovo = fit_multiclass(ds, 3, MulticlassScheme::OvO, cfg, 2);
  CHECK(ovo.members.size() == 3);
  const auto ovr = fit_multiclass(ds, 3, MulticlassScheme::OvR, cfg, 2);
  CHECK(ovr.members.size() == 3);
  for (const auto* model : {&ovo, &ovr}) {
    std::vector<int> y, yhat;
    for (const auto& r : ds.records) {
      y.push_back(*r.label);
      yhat.push_back(model->predict(r.t));
      CHECK(yhat.back() >= 0);
      CHECK(yhat.back() < 3);
    }
    CHECK(macro_accuracy(confusion(y, yhat, 3).counts) > 1.0 / 3.0);
  }
  CHECK_THROWS_AS(fit_multiclass(ds, 2, MulticlassScheme::OvO, cfg, 2), Error);
  CHECK_THROWS_AS(fit_multiclass(ds, 2, MulticlassScheme::OvR, cfg, 2), Error);  // label 2 out of range

  const auto bin = toy([](double t) { return std::sin(t) - 0.1; }, {0.0, 1.0}, true);
  const auto two = fit_multiclass(bin, 2, MulticlassScheme::OvR, cfg, 2);
  REQUIRE(two.members.size() == 1);
  const auto single = classifier_model(fit_classifier(bin, cfg, 2));
  for (const auto& r : bin.records) CHECK(two.predict(r.t) == predict_label(single, r.t));
}

TEST_CASE("one-vs-one tie rule") {
  // Three members that each vote for a different class: the class with the
  // highest mean probability wins.
  MulticlassModel m;
  m.scheme = MulticlassScheme::OvO;
  m.n_classes = 3;
  auto member = [](int pos, int neg, double xi) {
    BinaryMember b;
    b.positive = pos;
    b.negative = neg;
    b.model = ClassifierModel{ThetaAnsatz({xi}), {0.0, 1.0}};  // xi = sin t at t = pi/2
    return b;
  };
  // (1 vs 0) votes 1 with p = s(2); (2 vs 0) votes 0 with p = s(-0.5);
  // (2 vs 1) votes 2 with p = s(0.1).
  m.members = {member(1, 0, 2.0), member(2, 0, -0.5), member(2, 1, 0.1)};
  const double s2 = sigmoid(2.0), sm = sigmoid(-0.5), s01 = sigmoid(0.1);
  const double mean0 = ((1 - s2) + (1 - sm)) / 2, mean1 = (s2 + (1 - s01)) / 2, mean2 = (sm + s01) / 2;
  REQUIRE(mean1 > mean0);
  REQUIRE(mean1 > mean2);
  CHECK(m.predict(pi / 2) == 1);

  // With xi = a, -a, a every class collects one vote and a mean probability
  // of exactly one half, so the lowest index wins.
  const double a = 0.75;
  m.members = {member(1, 0, a), member(2, 0, -a), member(2, 1, a)};
  REQUIRE(sigmoid(a) + sigmoid(-a) == 1.0);
  CHECK(m.predict(pi / 2) == 0);
}
