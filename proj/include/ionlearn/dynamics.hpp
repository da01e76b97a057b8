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

#ifndef IONLEARN_DYNAMICS_HPP
#define IONLEARN_DYNAMICS_HPP

#include <algorithm>
#include <array>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ionlearn {

struct CanonicalPair {
  double x = 0.0;
  double p = 0.0;
};

struct Interval {
  double t_min = 0.0;
  double t_max = 0.0;
  double length() const noexcept { return t_max - t_min; }
};

/// Monotone sequence of sample times.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> nodes);

  /// `count` equally spaced nodes including both end points.
  static TimeGrid uniform(double t0, double t1, std::size_t count);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double operator[](std::size_t i) const noexcept { return nodes_[i]; }
  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }

 private:
  std::vector<double> nodes_;
};

struct HarmonicTerm {
  double amplitude = 0.0;
  double frequency = 0.0;
};

/// Dimensionless elastic coefficient beta(t) of H = p^2/2 + beta(t) x^2/2.
class ElasticField {
 public:
  enum class Kind { HarmonicSeries, Constant, CustomProfile };

  /// sum_j a_j cos(w_j t)
  static ElasticField harmonic(std::vector<HarmonicTerm> terms);
  static ElasticField constant(double value);
  /// Wraps an arbitrary profile. The callable must be pure.
  static ElasticField custom(std::function<double(double)> profile, std::string label = "custom");

  /// The four-wave superposition used for the canonical trajectory:
  /// amplitudes 25/24, 1/11, 37/36, 1/12 at frequencies 0, 4/25, 2, 4.
  static ElasticField four_wave();

  double operator()(double t) const;

  Kind kind() const noexcept { return kind_; }
  const std::vector<HarmonicTerm>& terms() const noexcept { return terms_; }
  const std::string& label() const noexcept { return label_; }
  bool is_even() const noexcept { return kind_ != Kind::CustomProfile; }

 private:
  ElasticField(Kind kind, std::vector<HarmonicTerm> terms, std::function<double(double)> profile,
               std::string label);

  Kind kind_;
  std::vector<HarmonicTerm> terms_;
  std::function<double(double)> profile_;
  std::string label_;
};

/// beta(t) = (scale / lB(t)^2)^2 for a time-dependent magnetic length lB.
/// `checks` lists the times where positivity of lB is verified up front;
/// evaluation outside them still throws on a nonpositive length.
ElasticField beta_from_magnetic_length(std::function<double(double)> magnetic_length, double scale,
                                       std::span<const double> checks);

/// theta(t) = sum_j a_{2j-1} sin((2j-1) w t), coefficients stored in order
/// a_1, a_3, a_5, ... The base frequency w is 1 unless given.
class ThetaAnsatz {
 public:
  ThetaAnsatz() = default;
  explicit ThetaAnsatz(std::vector<double> coeffs, double base_frequency = 1.0);

  std::size_t n_params() const noexcept { return coeffs_.size(); }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double base_frequency() const noexcept { return omega_; }

  double value(double t) const noexcept { return derivative(t, 0); }
  /// Term-by-term derivative of order 0..3.
  double derivative(double t, int order) const noexcept;

 private:
  std::vector<double> coeffs_;
  double omega_ = 1.0;
};

/// Real 2x2 matrix u(t, t0) acting on (x p)^T.
struct EvolutionMatrix {
  double u11 = 1.0, u12 = 0.0, u21 = 0.0, u22 = 1.0;
  double t = 0.0;
  double t0 = 0.0;

  static EvolutionMatrix identity(double t0) { return {1.0, 0.0, 0.0, 1.0, t0, t0}; }

  double det() const noexcept { return u11 * u22 - u12 * u21; }
  double trace() const noexcept { return u11 + u22; }
  CanonicalPair apply(CanonicalPair q) const noexcept {
    return {u11 * q.x + u12 * q.p, u21 * q.x + u22 * q.p};
  }
  bool finite() const noexcept;
};

/// Matrix product a * b; the result spans from b.t0 to a.t.
EvolutionMatrix compose(const EvolutionMatrix& a, const EvolutionMatrix& b) noexcept;

/// Max-norm distance between the entries of two matrices.
double max_abs_diff(const EvolutionMatrix& a, const EvolutionMatrix& b) noexcept;

inline constexpr std::size_t kDefaultSteps = 4000;

/// Fixed-step classical RK4 for du/dt = antidiag(1, -beta(t)) u, u(t0) = 1.
/// Returns steps + 1 matrices at the nodes t0 + k (t1 - t0) / steps.
std::vector<EvolutionMatrix> integrate_cauchy(const ElasticField& field, double t0, double t1,
                                              std::size_t steps = kDefaultSteps);

/// u(t, t0) at each requested node (sorted, all >= t0), using RK4 substeps no
/// longer than `max_step`. Nodes are hit exactly.
std::vector<EvolutionMatrix> evolve_to_nodes(const ElasticField& field, double t0,
                                             std::span<const double> nodes, double max_step);

enum class Stability { Focusing, Edge, Defocusing };
const char* to_string(Stability s) noexcept;

struct StabilityClass {
  Stability tag = Stability::Focusing;
  double gamma = 0.0;
  std::array<std::complex<double>, 2> kappa{};
};

inline constexpr double kEdgeTolerance = 1e-9;

/// Classifies by |tr u| against 2; kappa = (G +- sqrt(G^2 - 4)) / 2.
StabilityClass classify_stability(const EvolutionMatrix& u, double tol = kEdgeTolerance);

/// Lower-left entry of the closed-form matrix: `Halved` uses
/// (thetadot^2 - 1) / (2 theta), giving det u = (thetadot^2 + 1) / 2; `Det1`
/// uses (thetadot^2 - 1) / theta, which keeps det u = 1.
enum class Convention { Halved, Det1 };

inline constexpr double kThetaZeroWindow = 1e-9;

/// Closed-form u = [[thetadot, theta], [lower, thetadot]] at time t. The
/// result carries no reference time, so its t0 is NaN.
EvolutionMatrix closed_form_u(const ThetaAnsatz& theta, double t,
                              Convention convention = Convention::Det1);

/// beta = (thetadot^2 - 1) / theta^2 - 2 thetaddot / theta. At an admissible
/// zero of theta (|thetadot| = 1) the limit -thetadot * theta''' is returned.
double beta_from_theta(const ThetaAnsatz& theta, double t);

struct ThetaValidityReport {
  bool bounded = true;
  std::vector<std::pair<double, double>> zero_crossings;  // (t, thetadot)
  std::vector<std::pair<double, double>> steady_points;   // (t, theta''')
  bool admissible = true;
};

/// Checks the two admissibility conditions on a grid: |thetadot| = 1 where
/// theta = 0, and theta''' = 0 where thetadot and betadot vanish together
/// with theta and beta nonzero. Crossings are refined by bisection to 1e-12.
ThetaValidityReport validate_theta(const ThetaAnsatz& theta, const TimeGrid& grid,
                                   double tol = 1e-6);

/// Sum of | |thetadot| - 1 | over the zero crossings on the grid; zero for an
/// admissible ansatz.
double admissibility_violation(const ThetaAnsatz& theta, const TimeGrid& grid);

struct LoopDistance {
  double to_identity = 0.0;
  double to_minus_identity = 0.0;
  double best() const noexcept { return std::min(to_identity, to_minus_identity); }
  /// +1 if closer to 1, -1 if closer to -1.
  int sign() const noexcept { return to_identity <= to_minus_identity ? 1 : -1; }
};

LoopDistance loop_distance(const EvolutionMatrix& u) noexcept;
bool detect_loop(const EvolutionMatrix& u, double tol);

/// max over the grid of |theta'' + beta theta / 2 - (thetadot^2 - 1) / (2 theta)|,
/// skipping nodes with |theta| < kThetaZeroWindow.
double oscillator_residual(const ThetaAnsatz& theta, const ElasticField& field, const TimeGrid& grid);

}  // namespace ionlearn

#endif  // IONLEARN_DYNAMICS_HPP
