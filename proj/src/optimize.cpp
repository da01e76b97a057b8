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

#include "ionlearn/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "ionlearn/error.hpp"
#include "ionlearn/gaussian_process.hpp"
#include "ionlearn/rng.hpp"

namespace ionlearn {
namespace {

constexpr double kLengthScale = 0.2;
constexpr double kNegligibleEi = 1e-12;
constexpr double kWarpOffset = 0.01;
constexpr std::uint64_t kDesignStream = 11;
constexpr std::uint64_t kSearchStream = 12;

// Running-best bookkeeping shared by both optimizers.
class Tracker {
 public:
  Tracker(const Objective& objective, const ParameterSpace& space, const OptimizerConfig& config)
      : objective_(objective), space_(space), config_(config) {}

  void evaluate(std::vector<double> params, bool fallback = false) {
    for (std::size_t d = 0; d < params.size(); ++d) params[d] = std::clamp(params[d], space_.lower[d], space_.upper[d]);
    const double cost = objective_(params);
    if (!std::isfinite(cost)) throw Error(ErrorCode::Integration, "objective returned a non-finite value");
    if (cost < best_ - config_.min_improvement) {
      stale_ = 0;
    } else {
      ++stale_;
    }
    if (cost < best_) {
      best_ = cost;
      trace_.best_index = trace_.evaluations.size();
    }
    trace_.evaluations.push_back({std::move(params), cost, fallback});
  }

  std::size_t count() const noexcept { return trace_.evaluations.size(); }
  bool budget_spent() const noexcept { return count() >= config_.budget; }
  bool out_of_patience() const noexcept { return count() >= config_.init_points && stale_ >= config_.patience; }

  OptimizationTrace finish(StopReason reason) {
    trace_.stop_reason = reason;
    return std::move(trace_);
  }

  const OptimizationTrace& trace() const noexcept { return trace_; }

 private:
  const Objective& objective_;
  const ParameterSpace& space_;
  const OptimizerConfig& config_;
  OptimizationTrace trace_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t stale_ = 0;
};

std::vector<double> uniform_point(const ParameterSpace& space, Rng& rng) {
  std::vector<double> x(space.dimension());
  for (std::size_t d = 0; d < x.size(); ++d) x[d] = rng.uniform(space.lower[d], space.upper[d]);
  return x;
}

double to_unit(double v, double lo, double hi) { return (v - lo) / (hi - lo); }

struct Surrogate {
  GaussianProcess gp;
  double best_standardized;
};

// Fits the surrogate with escalating jitter; nullopt-like failure is signalled
// by a GP that is not ok().
Surrogate fit_surrogate(const OptimizationTrace& trace, const ParameterSpace& space) {
  const std::size_t n = trace.evaluations.size();
  const std::size_t dim = space.dimension();
  Eigen::MatrixXd points(dim, n);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = trace.evaluations[i];
    for (std::size_t d = 0; d < dim; ++d) points(d, i) = to_unit(e.params[d], space.lower[d], space.upper[d]);
    y(i) = e.cost;
  }
  // Log warp: keeps a few large costs from flattening the region near the
  // best ones once everything is standardized.
  const double lo = y.minCoeff();
  const double offset = std::max(kWarpOffset * (y.maxCoeff() - lo), std::numeric_limits<double>::min());
  y = ((y.array() - lo) + offset).log().matrix();
  const double mean = y.mean();
  const double sd = std::sqrt((y.array() - mean).square().sum() / static_cast<double>(n));
  Eigen::VectorXd z = sd > 0.0 ? Eigen::VectorXd((y.array() - mean) / sd) : Eigen::VectorXd::Zero(n);
  double signal = (z.array() - z.mean()).square().sum() / static_cast<double>(n);
  if (!(signal > 0.0)) signal = 1.0;
  // Constant prior mean at the worst observation: with the short fixed length
  // scale a zero mean makes every unexplored corner look average, and EI then
  // spends the budget there instead of refining the incumbent.
  const Eigen::VectorXd centered = (z.array() - z.maxCoeff()).matrix();
  const Eigen::VectorXd lengths = Eigen::VectorXd::Constant(dim, kLengthScale);
  for (double jitter : {1e-6, 1e-5, 1e-4}) {
    GaussianProcess gp(points, centered, lengths, signal, jitter);
    if (gp.ok()) return {std::move(gp), centered.minCoeff()};
  }
  return {GaussianProcess(points, centered, lengths, signal, 1e-4), centered.minCoeff()};
}

Eigen::VectorXd acquisition(const Surrogate& s, const Eigen::MatrixXd& x) {
  Eigen::VectorXd mean, sd;
  s.gp.predict(x, mean, sd);
  Eigen::VectorXd ei(x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) ei(i) = expected_improvement(mean(i), sd(i), s.best_standardized);
  return ei;
}

// Returns the unit-cube maximizer of EI and its value.
std::pair<Eigen::VectorXd, double> maximize_ei(const Surrogate& s, const Eigen::VectorXd& incumbent,
                                               std::size_t count, Rng& rng) {
  const auto dim = incumbent.size();
  const std::size_t local = count / 4;
  Eigen::MatrixXd cand(dim, static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    for (Eigen::Index d = 0; d < dim; ++d) {
      const double v = j < count - local ? rng.uniform() : incumbent(d) + 0.05 * rng.normal();
      cand(d, static_cast<Eigen::Index>(j)) = std::clamp(v, 0.0, 1.0);
    }
  }
  const Eigen::VectorXd ei = acquisition(s, cand);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(ei.size()));
  std::iota(order.begin(), order.end(), 0);
  const std::size_t starts = std::min<std::size_t>(3, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                    [&](Eigen::Index a, Eigen::Index b) { return ei(a) > ei(b) || (ei(a) == ei(b) && a < b); });

  Eigen::VectorXd best_x = cand.col(order.front());
  double best_ei = ei(order.front());
  for (std::size_t k = 0; k < starts; ++k) {
    Eigen::VectorXd x = cand.col(order[k]);
    double fx = ei(order[k]);
    double step = 0.05;
    for (int it = 0; it < 30 && step > 1e-4; ++it) {
      Eigen::MatrixXd probes(dim, 2 * dim);
      for (Eigen::Index d = 0; d < dim; ++d) {
        probes.col(2 * d) = x;
        probes.col(2 * d + 1) = x;
        probes(d, 2 * d) = std::min(1.0, x(d) + step);
        probes(d, 2 * d + 1) = std::max(0.0, x(d) - step);
      }
      const Eigen::VectorXd pe = acquisition(s, probes);
      Eigen::Index arg = 0;
      const double top = pe.maxCoeff(&arg);
      if (top > fx) {
        fx = top;
        x = probes.col(arg);
      } else {
        step *= 0.5;
      }
    }
    if (fx > best_ei) {
      best_ei = fx;
      best_x = x;
    }
  }
  return {best_x, best_ei};
}

}  // namespace

ParameterSpace ParameterSpace::box(std::size_t dimension, double lo, double hi) {
  ParameterSpace s{std::vector<double>(dimension, lo), std::vector<double>(dimension, hi)};
  s.validate();
  return s;
}

bool ParameterSpace::contains(std::span<const double> x) const noexcept {
  if (x.size() != dimension()) return false;
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (x[d] < lower[d] || x[d] > upper[d]) return false;
  }
  return true;
}

void ParameterSpace::validate() const {
  if (lower.empty() || lower.size() != upper.size()) throw Error(ErrorCode::Domain, "parameter space bounds mismatch");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!(lower[d] < upper[d]) || !std::isfinite(lower[d]) || !std::isfinite(upper[d])) {
      throw Error(ErrorCode::Domain, "parameter space needs finite lower < upper");
    }
  }
}

const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::Budget: return "budget";
    case StopReason::Patience: return "patience";
  }
  return "?";
}

const char* to_string(Method m) noexcept { return m == Method::Bayes ? "bayes" : "random"; }

void OptimizerConfig::validate() const {
  if (init_points < 1) throw Error(ErrorCode::Domain, "init_points must be >= 1");
  if (budget < init_points) throw Error(ErrorCode::Domain, "budget must be >= init_points");
  if (patience < 1) throw Error(ErrorCode::Domain, "patience must be >= 1");
  if (!(min_improvement >= 0.0)) throw Error(ErrorCode::Domain, "min_improvement must be >= 0");
  if (candidates < 4) throw Error(ErrorCode::Domain, "candidates must be >= 4");
}

double expected_improvement(double mu, double sigma, double best) {
  const double gain = best - mu;
  if (!(sigma > 0.0)) return std::max(gain, 0.0);
  const double z = gain / sigma;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return std::max(gain * cdf + sigma * pdf, 0.0);
}

std::vector<std::vector<double>> latin_hypercube(const ParameterSpace& space, std::size_t n, Rng& rng) {
  const std::size_t dim = space.dimension();
  std::vector<std::vector<double>> design(n, std::vector<double>(dim));
  std::vector<std::size_t> strata(n);
  for (std::size_t d = 0; d < dim; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    rng.shuffle(std::span<std::size_t>(strata));
    const double width = space.upper[d] - space.lower[d];
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(strata[i]) + rng.uniform()) / static_cast<double>(n);
      design[i][d] = space.lower[d] + width * u;
    }
  }
  return design;
}

OptimizationTrace bayes_minimize(const Objective& objective, const ParameterSpace& space,
                                 const OptimizerConfig& config) {
  space.validate();
  config.validate();
  Rng design_rng(derive_seed(config.seed, kDesignStream));
  Rng search_rng(derive_seed(config.seed, kSearchStream));
  Tracker tracker(objective, space, config);

  for (auto& x : latin_hypercube(space, config.init_points, design_rng)) tracker.evaluate(std::move(x));

  const std::size_t dim = space.dimension();
  while (true) {
    if (tracker.budget_spent()) return tracker.finish(StopReason::Budget);
    if (tracker.out_of_patience()) return tracker.finish(StopReason::Patience);

    const Surrogate surrogate = fit_surrogate(tracker.trace(), space);
    if (!surrogate.gp.ok()) {
      tracker.evaluate(uniform_point(space, search_rng), true);
      continue;
    }
    const auto& incumbent = tracker.trace().best().params;
    Eigen::VectorXd inc(static_cast<Eigen::Index>(dim));
    for (std::size_t d = 0; d < dim; ++d) {
      inc(static_cast<Eigen::Index>(d)) = to_unit(incumbent[d], space.lower[d], space.upper[d]);
    }
    const auto [unit, ei] = maximize_ei(surrogate, inc, config.candidates, search_rng);
    if (ei < kNegligibleEi) {
      // The surrogate sees nothing left to gain; explore instead of stopping.
      tracker.evaluate(uniform_point(space, search_rng), true);
      continue;
    }
    std::vector<double> x(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      x[d] = space.lower[d] + (space.upper[d] - space.lower[d]) * unit(static_cast<Eigen::Index>(d));
    }
    tracker.evaluate(std::move(x));
  }
}

OptimizationTrace random_search(const Objective& objective, const ParameterSpace& space,
                                const OptimizerConfig& config) {
  space.validate();
  config.validate();
  Rng rng(derive_seed(config.seed, kSearchStream));
  Tracker tracker(objective, space, config);
  while (true) {
    if (tracker.budget_spent()) return tracker.finish(StopReason::Budget);
    if (tracker.out_of_patience()) return tracker.finish(StopReason::Patience);
    tracker.evaluate(uniform_point(space, rng));
  }
}

OptimizationTrace minimize(const Objective& objective, const ParameterSpace& space, const OptimizerConfig& config) {
  return config.method == Method::Bayes ? bayes_minimize(objective, space, config)
                                        : random_search(objective, space, config);
}

}  // namespace ionlearn
