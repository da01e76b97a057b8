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

#ifndef IONLEARN_WAVEPACKET_HPP
#define IONLEARN_WAVEPACKET_HPP

#include <cstdint>
#include <span>

#include "ionlearn/datagen.hpp"
#include "ionlearn/dynamics.hpp"
#include "ionlearn/learning.hpp"
#include "ionlearn/optimize.hpp"

namespace ionlearn {

/// Gaussian state in the (x, p) phase plane. A quadratic Hamiltonian maps it
/// to another Gaussian: the mean moves by u and the covariance by u C u^T.
struct GaussianState {
  CanonicalPair mean{1.0, 1.0};
  Covariance cov{0.5, 0.0, 0.5};  // xx, xp, pp

  double cov_det() const noexcept { return cov[0] * cov[2] - cov[1] * cov[1]; }
  /// Positive definite with det >= 1/4 (within 1e-12).
  void validate() const;

  static GaussianState minimum_uncertainty(CanonicalPair mean) { return {mean, {0.5, 0.0, 0.5}}; }
};

GaussianState propagate_gaussian(const GaussianState& state, const EvolutionMatrix& u);

/// Position marginal (2 pi s_xx)^(-1/2) exp(-(x - <x>)^2 / (2 s_xx)).
double density(const GaussianState& state, double x);

/// Trapezoidal integral of the position marginal over +-half_width_sd
/// standard deviations with `nodes` samples.
double density_mass(const GaussianState& state, double half_width_sd = 8.0, std::size_t nodes = 4001);

struct DensitySpec {
  ElasticField field = ElasticField::four_wave();
  GaussianState state0 = GaussianState::minimum_uncertainty({1.0, 1.0});
  Interval interval = kDefaultInterval;  // evolution starts at interval.t_min
  double noise_fraction = 0.0;
  std::uint64_t seed = 0;
  double train_ratio = 0.8;
  SplitStrategy strategy = SplitStrategy::Stratified;
  std::size_t steps = kDefaultSteps;
};

/// Records (t, x, rho(x, t)) over the outer product of the grids, t-major.
Dataset make_density_dataset(const DensitySpec& spec, std::span<const double> x_grid, const TimeGrid& t_grid,
                             Warnings* warnings = nullptr);

/// rho(x, t) predicted from the ansatz. Mean and s_xx depend only on the top
/// row (thetadot, theta) of the closed-form matrix, which is the same under
/// both lower-entry conventions, so the model has no singular points.
double predict_density(const ThetaAnsatz& theta, const GaussianState& state0, double t, double x);

/// Mean-square fit of the density surface; state0 comes from the dataset
/// provenance (q0 and covariance).
FitReport fit_density_regression(const Dataset& ds, const OptimizerConfig& config, std::size_t n_params,
                                 const FitOptions& options = {});

}  // namespace ionlearn

#endif  // IONLEARN_WAVEPACKET_HPP
