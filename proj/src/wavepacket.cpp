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

#include "ionlearn/wavepacket.hpp"

#include <cmath>
#include <numbers>

#include "ionlearn/error.hpp"
#include "ionlearn/rng.hpp"

namespace ionlearn {
namespace {

constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kSplitStream = 2;

double gaussian_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

GaussianState state_from(const Dataset& ds) {
  if (!ds.provenance.covariance) throw Error(ErrorCode::Domain, "density dataset provenance lacks a covariance");
  GaussianState s{ds.provenance.q0, *ds.provenance.covariance};
  s.validate();
  return s;
}

MetricMap density_metrics(const ThetaAnsatz& theta, const GaussianState& state0, const std::vector<Record>& rows) {
  std::vector<double> y, yhat;
  for (const auto& r : rows) {
    y.push_back(r.target);
    yhat.push_back(predict_density(theta, state0, r.t, *r.x_coord));
  }
  MetricMap m;
  m.values["rmse"] = rmse(y, yhat);
  m.values["mse"] = m.values["rmse"] * m.values["rmse"];
  try {
    m.values["r2"] = r2(y, yhat);
  } catch (const Error&) {
  }
  return m;
}

}  // namespace

void GaussianState::validate() const {
  for (double c : cov) {
    if (!std::isfinite(c)) throw Error(ErrorCode::Domain, "covariance must be finite");
  }
  if (!(cov[0] > 0.0) || !(cov[2] > 0.0) || !(cov_det() > 0.0)) {
    throw Error(ErrorCode::Domain, "covariance is not positive definite");
  }
  if (cov_det() < 0.25 - 1e-12) throw Error(ErrorCode::Domain, "covariance violates det >= 1/4");
}

GaussianState propagate_gaussian(const GaussianState& state, const EvolutionMatrix& u) {
  if (!u.finite()) throw Error(ErrorCode::Domain, "evolution matrix is not finite");
  const auto [sxx, sxp, spp] = state.cov;
  if (!(sxx > 0.0) || !(spp > 0.0) || !(sxx * spp - sxp * sxp > 0.0)) {
    throw Error(ErrorCode::Domain, "covariance is not positive definite");
  }
  GaussianState out;
  out.mean = u.apply(state.mean);
  // C' = u C u^T
  const double a = u.u11, b = u.u12, c = u.u21, d = u.u22;
  out.cov[0] = a * a * sxx + 2.0 * a * b * sxp + b * b * spp;
  out.cov[1] = a * c * sxx + (a * d + b * c) * sxp + b * d * spp;
  out.cov[2] = c * c * sxx + 2.0 * c * d * sxp + d * d * spp;
  return out;
}

double density(const GaussianState& state, double x) { return gaussian_pdf(x, state.mean.x, state.cov[0]); }

double density_mass(const GaussianState& state, double half_width_sd, std::size_t nodes) {
  const double sd = std::sqrt(state.cov[0]);
  const double lo = state.mean.x - half_width_sd * sd;
  const double h = 2.0 * half_width_sd * sd / static_cast<double>(nodes - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double w = (i == 0 || i + 1 == nodes) ? 0.5 : 1.0;
    sum += w * density(state, lo + h * static_cast<double>(i));
  }
  return sum * h;
}

Dataset make_density_dataset(const DensitySpec& spec, std::span<const double> x_grid, const TimeGrid& t_grid,
                             Warnings* warnings) {
  spec.state0.validate();
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > x_grid[i - 1])) throw Error(ErrorCode::Domain, "x grid must be strictly increasing");
  }
  const auto path = evolve_to_nodes(spec.field, spec.interval.t_min, t_grid.nodes(),
                                    spec.interval.length() / static_cast<double>(spec.steps));
  std::vector<double> clean;
  clean.reserve(x_grid.size() * t_grid.size());
  Dataset ds;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const auto state = propagate_gaussian(spec.state0, path[k]);
    for (double x : x_grid) {
      Record r;
      r.t = t_grid[k];
      r.x_coord = x;
      clean.push_back(density(state, x));
      ds.records.push_back(r);
    }
  }
  const auto noisy = add_noise(clean, spec.noise_fraction, derive_seed(spec.seed, kNoiseStream), warnings);
  for (std::size_t i = 0; i < noisy.size(); ++i) ds.records[i].target = noisy[i];
  ds.provenance.seed = spec.seed;
  ds.provenance.noise_fraction = spec.noise_fraction;
  ds.provenance.field = spec.field;
  ds.provenance.q0 = spec.state0.mean;
  ds.provenance.interval = spec.interval;
  ds.provenance.covariance = spec.state0.cov;
  return split_dataset(std::move(ds), spec.train_ratio, derive_seed(spec.seed, kSplitStream), spec.strategy, warnings);
}

double predict_density(const ThetaAnsatz& theta, const GaussianState& state0, double t, double x) {
  const double a = theta.derivative(t, 1);
  const double b = theta.value(t);
  const double mean = a * state0.mean.x + b * state0.mean.p;
  const auto [sxx, sxp, spp] = state0.cov;
  const double var = a * a * sxx + 2.0 * a * b * sxp + b * b * spp;
  if (!(var > 0.0)) return 0.0;
  return gaussian_pdf(x, mean, var);
}

FitReport fit_density_regression(const Dataset& ds, const OptimizerConfig& config, std::size_t n_params,
                                 const FitOptions& options) {
  if (n_params < 1) throw Error(ErrorCode::Domain, "n_params must be >= 1");
  if (!ds.has_x_coord()) throw Error(ErrorCode::Domain, "density regression needs x_coord");
  if (!ds.has_split() || ds.count(Split::Train) == 0) throw Error(ErrorCode::Domain, "dataset has no training split");
  const GaussianState state0 = state_from(ds);
  const auto train = ds.select(SplitSelector::Train);

  const Objective objective = [&](std::span<const double> a) {
    const ThetaAnsatz theta(std::vector<double>(a.begin(), a.end()));
    double ss = 0.0;
    for (const auto& r : train) {
      const double e = r.target - predict_density(theta, state0, r.t, *r.x_coord);
      ss += e * e;
    }
    return ss / static_cast<double>(train.size());
  };
  const auto trace = minimize(objective, ParameterSpace::box(n_params, options.coeff_lower, options.coeff_upper), config);

  FitReport report;
  report.task = Task::Density;
  report.seed = config.seed;
  report.q0 = state0.mean;
  report.covariance = state0.cov;
  report.best_params = trace.best().params;
  for (std::size_t i = 0; i < trace.evaluations.size(); ++i) report.history.emplace_back(i, trace.evaluations[i].cost);
  report.iterations_run = trace.evaluations.size();
  report.stop_reason = trace.stop_reason;
  report.best_cost = trace.best().cost;
  const ThetaAnsatz theta(report.best_params);
  report.train_metrics = density_metrics(theta, state0, train);
  const auto test = ds.select(SplitSelector::Test);
  if (!test.empty()) report.test_metrics = density_metrics(theta, state0, test);
  report.theta_validity = validate_theta(theta, validity_grid(ds));
  return report;
}

}  // namespace ionlearn
