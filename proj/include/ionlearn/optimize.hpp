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

#ifndef IONLEARN_OPTIMIZE_HPP
#define IONLEARN_OPTIMIZE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ionlearn {

class Rng;

struct ParameterSpace {
  std::vector<double> lower;
  std::vector<double> upper;

  static ParameterSpace box(std::size_t dimension, double lo, double hi);
  std::size_t dimension() const noexcept { return lower.size(); }
  bool contains(std::span<const double> x) const noexcept;
  void validate() const;
};

enum class Method { Bayes, Random };
enum class StopReason { Budget, Patience };
const char* to_string(StopReason r) noexcept;
const char* to_string(Method m) noexcept;

struct OptimizerConfig {
  std::size_t budget = 150;      // max objective evaluations
  std::size_t init_points = 10;  // Latin-hypercube design size
  std::size_t patience = 15;
  double min_improvement = 1e-4;
  std::uint64_t seed = 0;
  Method method = Method::Bayes;
  std::size_t candidates = 1024;  // acquisition samples per iteration

  void validate() const;
};

struct Evaluation {
  std::vector<double> params;
  double cost = 0.0;
  bool fallback = false;  // chosen by random search after a surrogate failure
};

struct OptimizationTrace {
  std::vector<Evaluation> evaluations;
  std::size_t best_index = 0;
  StopReason stop_reason = StopReason::Budget;

  const Evaluation& best() const { return evaluations.at(best_index); }
};

using Objective = std::function<double(std::span<const double>)>;

/// Closed-form EI for minimization: (best - mu) Phi(z) + sigma phi(z),
/// z = (best - mu) / sigma; max(best - mu, 0) when sigma = 0.
double expected_improvement(double mu, double sigma, double best);

/// n stratified samples per dimension with independent permutations.
std::vector<std::vector<double>> latin_hypercube(const ParameterSpace& space, std::size_t n, Rng& rng);

/// GP/EI Bayesian optimization.
///
/// Inputs are mapped to the unit cube. Costs are warped by
/// log(c - min + 0.01 (max - min)) and then standardized. The surrogate uses
/// length scale 0.2 per unit-cube dimension, signal variance equal to the
/// variance of the standardized costs, jitter 1e-6 and a constant prior mean
/// at the largest standardized cost seen so far; on a failed
/// factorization the jitter goes to 1e-5 then 1e-4, after which the
/// iteration falls back to a uniform random point. EI is maximized over
/// `candidates` random points (three quarters uniform, one quarter Gaussian
/// around the incumbent) followed by a compass search from the three best
/// candidates; when the largest EI found is below 1e-12 a uniform random point
/// is evaluated instead. Stops when the budget is spent or when `patience`
/// consecutive evaluations fail to beat the running best by `min_improvement`
/// (checked once the design is complete).
OptimizationTrace bayes_minimize(const Objective& objective, const ParameterSpace& space,
                                 const OptimizerConfig& config);

/// Uniform sampling with the same stopping rules.
OptimizationTrace random_search(const Objective& objective, const ParameterSpace& space,
                                const OptimizerConfig& config);

/// Dispatches on config.method.
OptimizationTrace minimize(const Objective& objective, const ParameterSpace& space, const OptimizerConfig& config);

}  // namespace ionlearn

#endif  // IONLEARN_OPTIMIZE_HPP
