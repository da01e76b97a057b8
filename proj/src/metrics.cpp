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

#include "ionlearn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ionlearn/error.hpp"

namespace ionlearn {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorCode::Domain, "metric inputs differ in length");
  if (a == 0) throw Error(ErrorCode::Domain, "metric inputs are empty");
}

}  // namespace

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) ss += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
  return std::sqrt(ss / static_cast<double>(y_true.size()));
}

double r2(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  const double mean = std::accumulate(y_true.begin(), y_true.end(), 0.0) / static_cast<double>(y_true.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
  }
  if (ss_tot == 0.0) throw Error(ErrorCode::Domain, "r2 undefined for constant targets");
  return 1.0 - ss_res / ss_tot;
}

RocResult roc_and_auc(std::span<const int> y_true, std::span<const double> scores) {
  check_lengths(y_true.size(), scores.size());
  long long positives = 0, negatives = 0;
  for (int y : y_true) {
    if (y == 1) ++positives;
    else if (y == 0) ++negatives;
    else throw Error(ErrorCode::Domain, "roc needs binary labels");
  }
  if (positives == 0 || negatives == 0) throw Error(ErrorCode::Domain, "roc needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocResult out;
  out.curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  long long tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      if (y_true[order[i]] == 1) ++tp;
      else ++fp;
      ++i;
    }
    const RocPoint next{static_cast<double>(fp) / static_cast<double>(negatives),
                        static_cast<double>(tp) / static_cast<double>(positives), threshold};
    const RocPoint& prev = out.curve.back();
    out.auc += (next.fpr - prev.fpr) * 0.5 * (next.tpr + prev.tpr);
    out.curve.push_back(next);
  }
  return out;
}

ConfusionResult confusion(std::span<const int> y_true, std::span<const int> y_pred, int n_classes) {
  check_lengths(y_true.size(), y_pred.size());
  if (n_classes < 2) throw Error(ErrorCode::Domain, "confusion needs at least 2 classes");
  const auto n = static_cast<std::size_t>(n_classes);
  ConfusionResult out;
  out.counts.assign(n, std::vector<long long>(n, 0));
  long long correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 0 || y_true[i] >= n_classes || y_pred[i] < 0 || y_pred[i] >= n_classes) {
      throw Error(ErrorCode::Domain, "label out of range in confusion matrix");
    }
    ++out.counts[static_cast<std::size_t>(y_true[i])][static_cast<std::size_t>(y_pred[i])];
    if (y_true[i] == y_pred[i]) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());
  if (n_classes == 2) {
    const double tp = static_cast<double>(out.counts[1][1]);
    const double fp = static_cast<double>(out.counts[0][1]);
    const double fn = static_cast<double>(out.counts[1][0]);
    out.precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    out.recall = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
  }
  return out;
}

double macro_accuracy(const ConfusionMatrix& counts) {
  double sum = 0.0;
  std::size_t classes = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const long long row = std::accumulate(counts[i].begin(), counts[i].end(), 0LL);
    if (row == 0) continue;
    sum += static_cast<double>(counts[i][i]) / static_cast<double>(row);
    ++classes;
  }
  return classes == 0 ? 0.0 : sum / static_cast<double>(classes);
}

}  // namespace ionlearn
