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

#ifndef IONLEARN_LEARNING_HPP
#define IONLEARN_LEARNING_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ionlearn/datagen.hpp"
#include "ionlearn/dynamics.hpp"
#include "ionlearn/metrics.hpp"
#include "ionlearn/optimize.hpp"

namespace ionlearn {

/// How momentum is read off a fitted ansatz. `Derivative` differentiates the
/// position model; the matrix modes use the lower row of the closed form.
enum class MomentumMode { MatrixHalved, MatrixDet1, Derivative };
const char* to_string(MomentumMode m) noexcept;

struct RegressionModel {
  ThetaAnsatz theta;
  CanonicalPair q0{1.0, 1.0};
  MomentumMode momentum_mode = MomentumMode::Derivative;
};

/// x(t) = x0 thetadot(t) + p0 theta(t).
double predict_position(const RegressionModel& model, double t);
double predict_momentum(const RegressionModel& model, double t);

/// Mean of squared residuals over the selected split.
double regression_cost(const RegressionModel& model, const Dataset& ds, SplitSelector which = SplitSelector::Train);

struct Calibration {
  double scale = 1.0;
  double bias = 0.0;
};

struct ClassifierModel {
  ThetaAnsatz theta;
  CanonicalPair q0{1.0, 1.0};
  double threshold = 0.5;
  std::optional<Calibration> calibration;
};

double sigmoid(double xi) noexcept;

/// The trained variable xi: predicted position, affinely calibrated if set.
double class_score(const ClassifierModel& model, double t);
double class_probability(const ClassifierModel& model, double t);
int predict_label(const ClassifierModel& model, double t);

inline constexpr double kProbabilityClamp = 1e-12;

/// -sum [y log p + (1 - y) log(1 - p)], p clamped to [1e-12, 1 - 1e-12].
double binary_cross_entropy(std::span<const int> labels, std::span<const double> probabilities);
double classification_cost(const ClassifierModel& model, const Dataset& ds,
                           SplitSelector which = SplitSelector::Train);

struct FitOptions {
  double coeff_lower = -2.0;
  double coeff_upper = 2.0;
  /// Weight of the admissibility violation added to the cost; 0 disables it.
  double admissibility_penalty = 0.0;
  /// Classifier only: also optimize xi -> scale * xi + bias.
  bool calibrate = false;
  double scale_lower = 0.1;
  double scale_upper = 10.0;
  double bias_lower = -5.0;
  double bias_upper = 5.0;
};

enum class Task { Regression, Classification, Density };
const char* to_string(Task t) noexcept;

struct FitReport {
  Task task = Task::Regression;
  std::vector<double> best_params;            // theta coefficients a_1, a_3, ...
  std::vector<std::pair<std::size_t, double>> history;  // (evaluation index, cost)
  MetricMap train_metrics;
  MetricMap test_metrics;
  std::uint64_t seed = 0;
  std::size_t iterations_run = 0;
  StopReason stop_reason = StopReason::Budget;
  ThetaValidityReport theta_validity;
  CanonicalPair q0{1.0, 1.0};
  std::optional<Calibration> calibration;
  std::optional<Covariance> covariance;  // density fits
  double best_cost = 0.0;
};

FitReport fit_regression(const Dataset& ds, const OptimizerConfig& config, std::size_t n_params,
                         const FitOptions& options = {});
FitReport fit_classifier(const Dataset& ds, const OptimizerConfig& config, std::size_t n_params,
                         const FitOptions& options = {});

RegressionModel regression_model(const FitReport& report, MomentumMode mode = MomentumMode::Derivative);
ClassifierModel classifier_model(const FitReport& report);

enum class MulticlassScheme { OvR, OvO };

struct BinaryMember {
  int positive = 1;
  int negative = -1;  // -1 means "every other class"
  ClassifierModel model;
  FitReport report;
};

struct MulticlassModel {
  MulticlassScheme scheme = MulticlassScheme::OvR;
  int n_classes = 0;
  std::vector<BinaryMember> members;

  /// OvR: highest member probability. OvO: majority vote, ties broken by the
  /// highest mean probability, then by the lowest class index.
  int predict(double t) const;
};

/// OvR with N = 2 trains the single binary classifier (class 1 vs 0).
MulticlassModel fit_multiclass(const Dataset& ds, int n_classes, MulticlassScheme scheme,
                               const OptimizerConfig& config, std::size_t n_params,
                               const FitOptions& options = {});

/// One row of a predictions file.
struct PredictionRow {
  double t = 0.0;
  std::optional<double> x_coord;
  std::optional<double> y_true;
  double y_pred = 0.0;
  std::optional<double> p_pred;
  std::optional<double> prob;
  std::optional<int> label_pred;
};

/// Grid used for post-fit admissibility checks: 2001 nodes over the dataset
/// interval.
TimeGrid validity_grid(const Dataset& ds);

}  // namespace ionlearn

#endif  // IONLEARN_LEARNING_HPP
