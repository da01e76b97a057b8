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

#include "ionlearn/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ionlearn/error.hpp"
#include "ionlearn/rng.hpp"

namespace ionlearn {
namespace {

std::vector<Record> require_split(const Dataset& ds, SplitSelector which) {
  auto rows = ds.select(which);
  if (rows.empty()) throw Error(ErrorCode::Domain, "selected split is empty");
  return rows;
}

std::vector<int> labels_of(const std::vector<Record>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (!r.label) throw Error(ErrorCode::Domain, "classification needs labels");
    out.push_back(*r.label);
  }
  return out;
}

void require_fit_inputs(const Dataset& ds, std::size_t n_params) {
  if (n_params < 1) throw Error(ErrorCode::Domain, "n_params must be >= 1");
  if (!ds.has_split()) throw Error(ErrorCode::Domain, "dataset has no train/test assignment");
  if (ds.count(Split::Train) == 0) throw Error(ErrorCode::Domain, "training split is empty");
}

void fill_history(FitReport& report, const OptimizationTrace& trace) {
  report.history.clear();
  for (std::size_t i = 0; i < trace.evaluations.size(); ++i) report.history.emplace_back(i, trace.evaluations[i].cost);
  report.iterations_run = trace.evaluations.size();
  report.stop_reason = trace.stop_reason;
  report.best_cost = trace.best().cost;
}

MetricMap regression_metrics(const RegressionModel& model, const std::vector<Record>& rows) {
  std::vector<double> y, yhat;
  for (const auto& r : rows) {
    y.push_back(r.target);
    yhat.push_back(predict_position(model, r.t));
  }
  MetricMap m;
  m.values["rmse"] = rmse(y, yhat);
  m.values["mse"] = m.values["rmse"] * m.values["rmse"];
  try {
    m.values["r2"] = r2(y, yhat);
  } catch (const Error&) {
    // constant targets: r2 undefined, left out
  }
  return m;
}

MetricMap classification_metrics(const ClassifierModel& model, const std::vector<Record>& rows) {
  const auto y = labels_of(rows);
  std::vector<double> prob;
  std::vector<int> pred;
  for (const auto& r : rows) {
    prob.push_back(class_probability(model, r.t));
    pred.push_back(prob.back() >= model.threshold ? 1 : 0);
  }
  MetricMap m;
  m.values["cross_entropy"] = binary_cross_entropy(y, prob);
  const auto c = confusion(y, pred, 2);
  m.values["accuracy"] = c.accuracy;
  m.values["precision"] = *c.precision;
  m.values["recall"] = *c.recall;
  m.confusion = c.counts;
  const bool both = std::count(y.begin(), y.end(), 1) > 0 && std::count(y.begin(), y.end(), 0) > 0;
  if (both) {
    auto roc = roc_and_auc(y, prob);
    m.values["auc"] = roc.auc;
    m.roc = std::move(roc.curve);
  }
  return m;
}

ClassifierModel classifier_from_params(std::span<const double> x, std::size_t n_params, CanonicalPair q0,
                                       bool calibrate) {
  ClassifierModel model{ThetaAnsatz(std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n_params))),
                        q0, 0.5, std::nullopt};
  if (calibrate) model.calibration = Calibration{x[n_params], x[n_params + 1]};
  return model;
}

}  // namespace

const char* to_string(MomentumMode m) noexcept {
  switch (m) {
    case MomentumMode::MatrixHalved: return "matrix_halved";
    case MomentumMode::MatrixDet1: return "matrix_det1";
    case MomentumMode::Derivative: return "derivative";
  }
  return "?";
}

const char* to_string(Task t) noexcept {
  switch (t) {
    case Task::Regression: return "regression";
    case Task::Classification: return "classification";
    case Task::Density: return "density";
  }
  return "?";
}

double predict_position(const RegressionModel& model, double t) {
  return model.q0.x * model.theta.derivative(t, 1) + model.q0.p * model.theta.value(t);
}

double predict_momentum(const RegressionModel& model, double t) {
  const double dth = model.theta.derivative(t, 1);
  if (model.momentum_mode == MomentumMode::Derivative) {
    return model.q0.x * model.theta.derivative(t, 2) + model.q0.p * dth;
  }
  const auto convention = model.momentum_mode == MomentumMode::MatrixDet1 ? Convention::Det1 : Convention::Halved;
  const auto u = closed_form_u(model.theta, t, convention);
  return u.u21 * model.q0.x + u.u22 * model.q0.p;
}

double regression_cost(const RegressionModel& model, const Dataset& ds, SplitSelector which) {
  const auto rows = require_split(ds, which);
  double ss = 0.0;
  for (const auto& r : rows) {
    const double e = r.target - predict_position(model, r.t);
    ss += e * e;
  }
  return ss / static_cast<double>(rows.size());
}

double sigmoid(double xi) noexcept {
  if (xi >= 0.0) return 1.0 / (1.0 + std::exp(-xi));
  const double e = std::exp(xi);
  return e / (1.0 + e);
}

double class_score(const ClassifierModel& model, double t) {
  const double xi = model.q0.x * model.theta.derivative(t, 1) + model.q0.p * model.theta.value(t);
  if (!model.calibration) return xi;
  return model.calibration->scale * xi + model.calibration->bias;
}

double class_probability(const ClassifierModel& model, double t) { return sigmoid(class_score(model, t)); }

int predict_label(const ClassifierModel& model, double t) {
  return class_probability(model, t) >= model.threshold ? 1 : 0;
}

double binary_cross_entropy(std::span<const int> labels, std::span<const double> probabilities) {
  if (labels.size() != probabilities.size()) throw Error(ErrorCode::Domain, "labels and probabilities differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(probabilities[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    sum -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return sum;
}

double classification_cost(const ClassifierModel& model, const Dataset& ds, SplitSelector which) {
  const auto rows = require_split(ds, which);
  const auto y = labels_of(rows);
  std::vector<double> prob;
  prob.reserve(rows.size());
  for (const auto& r : rows) prob.push_back(class_probability(model, r.t));
  return binary_cross_entropy(y, prob);
}

TimeGrid validity_grid(const Dataset& ds) {
  const auto& iv = ds.provenance.interval;
  return TimeGrid::uniform(iv.t_min, iv.t_max, 2001);
}

FitReport fit_regression(const Dataset& ds, const OptimizerConfig& config, std::size_t n_params,
                         const FitOptions& options) {
  require_fit_inputs(ds, n_params);
  const auto train = ds.select(SplitSelector::Train);
  const CanonicalPair q0 = ds.provenance.q0;
  const TimeGrid penalty_grid = TimeGrid::uniform(ds.provenance.interval.t_min, ds.provenance.interval.t_max, 401);

  const Objective objective = [&](std::span<const double> a) {
    RegressionModel model{ThetaAnsatz(std::vector<double>(a.begin(), a.end())), q0};
    double ss = 0.0;
    for (const auto& r : train) {
      const double e = r.target - predict_position(model, r.t);
      ss += e * e;
    }
    double cost = ss / static_cast<double>(train.size());
    if (options.admissibility_penalty > 0.0) {
      cost += options.admissibility_penalty * admissibility_violation(model.theta, penalty_grid);
    }
    return cost;
  };
  const auto trace = minimize(objective, ParameterSpace::box(n_params, options.coeff_lower, options.coeff_upper), config);

  FitReport report;
  report.task = Task::Regression;
  report.seed = config.seed;
  report.q0 = q0;
  report.best_params = trace.best().params;
  fill_history(report, trace);
  const auto model = regression_model(report);
  report.train_metrics = regression_metrics(model, train);
  const auto test = ds.select(SplitSelector::Test);
  if (!test.empty()) report.test_metrics = regression_metrics(model, test);
  report.theta_validity = validate_theta(model.theta, validity_grid(ds));
  return report;
}

FitReport fit_classifier(const Dataset& ds, const OptimizerConfig& config, std::size_t n_params,
                         const FitOptions& options) {
  require_fit_inputs(ds, n_params);
  const auto train = ds.select(SplitSelector::Train);
  const auto y = labels_of(train);
  for (int label : y) {
    if (label != 0 && label != 1) throw Error(ErrorCode::Domain, "binary classifier needs labels in {0, 1}");
  }
  const auto ones = std::count(y.begin(), y.end(), 1);
  if (ones == 0 || ones == static_cast<std::ptrdiff_t>(y.size())) {
    throw Error(ErrorCode::Domain, "training labels contain a single class");
  }
  const CanonicalPair q0 = ds.provenance.q0;
  const TimeGrid penalty_grid = TimeGrid::uniform(ds.provenance.interval.t_min, ds.provenance.interval.t_max, 401);

  ParameterSpace space = ParameterSpace::box(n_params, options.coeff_lower, options.coeff_upper);
  if (options.calibrate) {
    space.lower.push_back(options.scale_lower);
    space.upper.push_back(options.scale_upper);
    space.lower.push_back(options.bias_lower);
    space.upper.push_back(options.bias_upper);
  }

  const Objective objective = [&](std::span<const double> x) {
    const auto model = classifier_from_params(x, n_params, q0, options.calibrate);
    double sum = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const double p = std::clamp(class_probability(model, train[i].t), kProbabilityClamp, 1.0 - kProbabilityClamp);
      sum -= y[i] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    if (options.admissibility_penalty > 0.0) {
      sum += options.admissibility_penalty * admissibility_violation(model.theta, penalty_grid);
    }
    return sum;
  };
  const auto trace = minimize(objective, space, config);

  FitReport report;
  report.task = Task::Classification;
  report.seed = config.seed;
  report.q0 = q0;
  const auto& best = trace.best().params;
  report.best_params.assign(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(n_params));
  if (options.calibrate) report.calibration = Calibration{best[n_params], best[n_params + 1]};
  fill_history(report, trace);
  const auto model = classifier_model(report);
  report.train_metrics = classification_metrics(model, train);
  const auto test = ds.select(SplitSelector::Test);
  if (!test.empty()) report.test_metrics = classification_metrics(model, test);
  report.theta_validity = validate_theta(model.theta, validity_grid(ds));
  return report;
}

RegressionModel regression_model(const FitReport& report, MomentumMode mode) {
  return {ThetaAnsatz(report.best_params), report.q0, mode};
}

ClassifierModel classifier_model(const FitReport& report) {
  return {ThetaAnsatz(report.best_params), report.q0, 0.5, report.calibration};
}

int MulticlassModel::predict(double t) const {
  if (members.empty()) throw Error(ErrorCode::Domain, "multiclass model has no members");
  if (scheme == MulticlassScheme::OvR) {
    if (n_classes == 2) return predict_label(members.front().model, t);
    int best = 0;
    double best_p = -1.0;
    for (const auto& m : members) {
      const double p = class_probability(m.model, t);
      if (p > best_p) {
        best_p = p;
        best = m.positive;
      }
    }
    return best;
  }
  const auto n = static_cast<std::size_t>(n_classes);
  std::vector<int> votes(n, 0);
  std::vector<double> prob_sum(n, 0.0);
  std::vector<int> prob_count(n, 0);
  for (const auto& m : members) {
    const double p = class_probability(m.model, t);
    const auto pos = static_cast<std::size_t>(m.positive);
    const auto neg = static_cast<std::size_t>(m.negative);
    ++votes[p >= m.model.threshold ? pos : neg];
    prob_sum[pos] += p;
    prob_sum[neg] += 1.0 - p;
    ++prob_count[pos];
    ++prob_count[neg];
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < n; ++c) {
    const double mean_c = prob_count[c] ? prob_sum[c] / prob_count[c] : 0.0;
    const double mean_b = prob_count[best] ? prob_sum[best] / prob_count[best] : 0.0;
    if (votes[c] > votes[best] || (votes[c] == votes[best] && mean_c > mean_b)) best = c;
  }
  return static_cast<int>(best);
}

MulticlassModel fit_multiclass(const Dataset& ds, int n_classes, MulticlassScheme scheme,
                               const OptimizerConfig& config, std::size_t n_params, const FitOptions& options) {
  if (!ds.has_labels()) throw Error(ErrorCode::Domain, "multiclass fit needs labels");
  if (scheme == MulticlassScheme::OvO && n_classes < 3) throw Error(ErrorCode::Domain, "OvO needs at least 3 classes");
  if (n_classes < 2) throw Error(ErrorCode::Domain, "need at least 2 classes");
  for (const auto& r : ds.records) {
    if (*r.label < 0 || *r.label >= n_classes) throw Error(ErrorCode::Domain, "label outside {0..N-1}");
  }

  MulticlassModel out;
  out.scheme = scheme;
  out.n_classes = n_classes;

  // The N = 2 reduction keeps the caller's seed so it matches fit_classifier.
  auto train_member = [&](int positive, int negative, std::optional<std::size_t> index) {
    Dataset sub;
    sub.provenance = ds.provenance;
    for (const auto& r : ds.records) {
      if (negative >= 0 && *r.label != positive && *r.label != negative) continue;
      Record copy = r;
      copy.label = *r.label == positive ? 1 : 0;
      sub.records.push_back(copy);
    }
    OptimizerConfig member_config = config;
    if (index) member_config.seed = derive_seed(config.seed, 100 + *index);
    BinaryMember member;
    member.positive = positive;
    member.negative = negative;
    member.report = fit_classifier(sub, member_config, n_params, options);
    member.model = classifier_model(member.report);
    out.members.push_back(std::move(member));
  };

  if (scheme == MulticlassScheme::OvR) {
    if (n_classes == 2) {
      train_member(1, 0, std::nullopt);
    } else {
      for (int c = 0; c < n_classes; ++c) train_member(c, -1, static_cast<std::size_t>(c));
    }
  } else {
    std::size_t index = 0;
    for (int i = 0; i < n_classes; ++i) {
      for (int j = i + 1; j < n_classes; ++j) train_member(j, i, index++);
    }
  }
  return out;
}

}  // namespace ionlearn
