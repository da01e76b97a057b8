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

#ifndef IONLEARN_METRICS_HPP
#define IONLEARN_METRICS_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ionlearn {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

using ConfusionMatrix = std::vector<std::vector<long long>>;

struct MetricMap {
  std::map<std::string, double> values;  // rmse, r2, auc, accuracy, precision, recall, ...
  std::optional<ConfusionMatrix> confusion;
  std::optional<std::vector<RocPoint>> roc;

  std::optional<double> get(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  }
};

double rmse(std::span<const double> y_true, std::span<const double> y_pred);

/// 1 - SS_res / SS_tot; constant y_true is a domain error.
double r2(std::span<const double> y_true, std::span<const double> y_pred);

struct RocResult {
  std::vector<RocPoint> curve;  // starts at (0, 0, +inf), ends at (1, 1)
  double auc = 0.0;
};

/// Descending threshold sweep over the unique scores with tied scores taken
/// as one step; trapezoidal area. Both classes must be present.
RocResult roc_and_auc(std::span<const int> y_true, std::span<const double> scores);

struct ConfusionResult {
  ConfusionMatrix counts;  // counts[true][predicted]
  double accuracy = 0.0;
  // Binary only: taken for class 1.
  std::optional<double> precision;
  std::optional<double> recall;
};

ConfusionResult confusion(std::span<const int> y_true, std::span<const int> y_pred, int n_classes);

/// Mean over classes of per-class recall.
double macro_accuracy(const ConfusionMatrix& counts);

}  // namespace ionlearn

#endif  // IONLEARN_METRICS_HPP
