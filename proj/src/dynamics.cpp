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

#include "ionlearn/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ionlearn/error.hpp"

namespace ionlearn {
namespace {

// |thetadot| must equal 1 to this tolerance where theta vanishes before a
// limit value is substituted.
constexpr double kUnitSlopeTol = 1e-6;
constexpr double kNodeZero = 1e-12;
constexpr double kBisectionWidth = 1e-12;

std::string describe_time(const char* what, double t) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at t = " << t;
  return os.str();
}

struct Mat {
  double a, b, c, d;
};

// Lambda(t) u with Lambda = [[0, 1], [-beta, 0]].
inline Mat flow(double beta, const Mat& u) noexcept { return {u.c, u.d, -beta * u.a, -beta * u.b}; }

inline Mat axpy(const Mat& u, double h, const Mat& k) noexcept {
  return {u.a + h * k.a, u.b + h * k.b, u.c + h * k.c, u.d + h * k.d};
}

double checked_beta(const ElasticField& field, double t) {
  const double beta = field(t);
  if (!std::isfinite(beta)) {
    throw TimedError(ErrorCode::Integration, describe_time("non-finite elastic field", t), t);
  }
  return beta;
}

Mat rk4_step(const ElasticField& field, double t, double h, const Mat& u) {
  const double b0 = checked_beta(field, t);
  const double bm = checked_beta(field, t + 0.5 * h);
  const double b1 = checked_beta(field, t + h);
  const Mat k1 = flow(b0, u);
  const Mat k2 = flow(bm, axpy(u, 0.5 * h, k1));
  const Mat k3 = flow(bm, axpy(u, 0.5 * h, k2));
  const Mat k4 = flow(b1, axpy(u, h, k3));
  const Mat next{u.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
                 u.b + h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b),
                 u.c + h / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c),
                 u.d + h / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d)};
  // A finite field can still drive the state past double range.
  if (!(std::isfinite(next.a) && std::isfinite(next.b) && std::isfinite(next.c) && std::isfinite(next.d))) {
    throw TimedError(ErrorCode::Integration, describe_time("evolution overflowed", t + h), t + h);
  }
  return next;
}

EvolutionMatrix to_matrix(const Mat& m, double t, double t0) { return {m.a, m.b, m.c, m.d, t, t0}; }

template <typename F>
double bisect(F&& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200 && (b - a) > kBisectionWidth; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Roots of g on the grid: nodes where |g| <= kNodeZero plus refined sign
// changes between nodes that are both clear of zero.
template <typename G>
std::vector<double> locate_roots(G&& g, std::span<const double> nodes) {
  std::vector<double> roots;
  std::vector<double> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = g(nodes[i]);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (std::abs(values[i]) <= kNodeZero) {
      roots.push_back(nodes[i]);
      continue;
    }
    if (i + 1 < nodes.size() && std::abs(values[i + 1]) > kNodeZero &&
        (values[i] < 0.0) != (values[i + 1] < 0.0)) {
      roots.push_back(bisect(g, nodes[i], nodes[i + 1]));
    }
  }
  return roots;
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "domain error";
    case ErrorCode::Integration: return "integration error";
    case ErrorCode::Singularity: return "singularity error";
    case ErrorCode::Range: return "range error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Config: return "config error";
  }
  return "error";
}

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i])) throw Error(ErrorCode::Domain, "time grid contains a non-finite node");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      throw Error(ErrorCode::Domain, "time grid must be strictly increasing");
    }
  }
}

TimeGrid TimeGrid::uniform(double t0, double t1, std::size_t count) {
  if (count < 2 || !(t1 > t0)) throw Error(ErrorCode::Domain, "uniform grid needs t1 > t0 and at least 2 nodes");
  std::vector<double> nodes(count);
  const double h = (t1 - t0) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) nodes[i] = t0 + h * static_cast<double>(i);
  nodes.back() = t1;
  return TimeGrid(std::move(nodes));
}

ElasticField::ElasticField(Kind kind, std::vector<HarmonicTerm> terms, std::function<double(double)> profile,
                           std::string label)
    : kind_(kind), terms_(std::move(terms)), profile_(std::move(profile)), label_(std::move(label)) {}

ElasticField ElasticField::harmonic(std::vector<HarmonicTerm> terms) {
  for (const auto& term : terms) {
    if (!std::isfinite(term.amplitude) || !std::isfinite(term.frequency)) {
      throw Error(ErrorCode::Domain, "harmonic term must be finite");
    }
  }
  return ElasticField(Kind::HarmonicSeries, std::move(terms), {}, "harmonic");
}

ElasticField ElasticField::constant(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::Domain, "constant field must be finite");
  return ElasticField(Kind::Constant, {{value, 0.0}}, {}, "constant");
}

ElasticField ElasticField::custom(std::function<double(double)> profile, std::string label) {
  if (!profile) throw Error(ErrorCode::Domain, "custom field needs a profile");
  return ElasticField(Kind::CustomProfile, {}, std::move(profile), std::move(label));
}

ElasticField ElasticField::four_wave() {
  return harmonic({{25.0 / 24.0, 0.0}, {1.0 / 11.0, 4.0 / 25.0}, {37.0 / 36.0, 2.0}, {1.0 / 12.0, 4.0}});
}

double ElasticField::operator()(double t) const {
  switch (kind_) {
    case Kind::Constant: return terms_.front().amplitude;
    case Kind::HarmonicSeries: {
      double sum = 0.0;
      for (const auto& term : terms_) sum += term.amplitude * std::cos(term.frequency * t);
      return sum;
    }
    case Kind::CustomProfile: return profile_(t);
  }
  return 0.0;
}

ElasticField beta_from_magnetic_length(std::function<double(double)> magnetic_length, double scale,
                                       std::span<const double> checks) {
  if (!magnetic_length) throw Error(ErrorCode::Domain, "magnetic length profile missing");
  for (double t : checks) {
    const double lb = magnetic_length(t);
    if (!(lb > 0.0)) throw TimedError(ErrorCode::Domain, describe_time("nonpositive magnetic length", t), t);
  }
  auto profile = [lb = std::move(magnetic_length), scale](double t) {
    const double length = lb(t);
    if (!(length > 0.0)) throw TimedError(ErrorCode::Domain, describe_time("nonpositive magnetic length", t), t);
    const double root = scale / (length * length);
    return root * root;
  };
  return ElasticField::custom(std::move(profile), "magnetic");
}

ThetaAnsatz::ThetaAnsatz(std::vector<double> coeffs, double base_frequency)
    : coeffs_(std::move(coeffs)), omega_(base_frequency) {
  if (coeffs_.empty()) throw Error(ErrorCode::Domain, "theta ansatz needs at least one coefficient");
  if (!(std::isfinite(omega_) && omega_ > 0.0)) throw Error(ErrorCode::Domain, "theta base frequency must be positive");
  for (double a : coeffs_) {
    if (!std::isfinite(a)) throw Error(ErrorCode::Domain, "theta coefficient must be finite");
  }
}

double ThetaAnsatz::derivative(double t, int order) const noexcept {
  double sum = 0.0;
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    const double k = static_cast<double>(2 * j + 1) * omega_;
    const double kt = k * t;
    switch (order) {
      case 0: sum += coeffs_[j] * std::sin(kt); break;
      case 1: sum += coeffs_[j] * k * std::cos(kt); break;
      case 2: sum -= coeffs_[j] * k * k * std::sin(kt); break;
      default: sum -= coeffs_[j] * k * k * k * std::cos(kt); break;
    }
  }
  return sum;
}

bool EvolutionMatrix::finite() const noexcept {
  return std::isfinite(u11) && std::isfinite(u12) && std::isfinite(u21) && std::isfinite(u22);
}

EvolutionMatrix compose(const EvolutionMatrix& a, const EvolutionMatrix& b) noexcept {
  return {a.u11 * b.u11 + a.u12 * b.u21, a.u11 * b.u12 + a.u12 * b.u22,
          a.u21 * b.u11 + a.u22 * b.u21, a.u21 * b.u12 + a.u22 * b.u22, a.t, b.t0};
}

double max_abs_diff(const EvolutionMatrix& a, const EvolutionMatrix& b) noexcept {
  return std::max({std::abs(a.u11 - b.u11), std::abs(a.u12 - b.u12), std::abs(a.u21 - b.u21),
                   std::abs(a.u22 - b.u22)});
}

std::vector<EvolutionMatrix> integrate_cauchy(const ElasticField& field, double t0, double t1,
                                              std::size_t steps) {
  if (!(t1 > t0)) throw Error(ErrorCode::Domain, "integration needs t1 > t0");
  if (steps < 2) throw Error(ErrorCode::Domain, "integration needs at least 2 steps");
  const double h = (t1 - t0) / static_cast<double>(steps);
  std::vector<EvolutionMatrix> path;
  path.reserve(steps + 1);
  Mat u{1.0, 0.0, 0.0, 1.0};
  path.push_back(to_matrix(u, t0, t0));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + h * static_cast<double>(k);
    u = rk4_step(field, t, h, u);
    const double t_next = (k + 1 == steps) ? t1 : t0 + h * static_cast<double>(k + 1);
    path.push_back(to_matrix(u, t_next, t0));
  }
  return path;
}

std::vector<EvolutionMatrix> evolve_to_nodes(const ElasticField& field, double t0,
                                             std::span<const double> nodes, double max_step) {
  if (!(max_step > 0.0)) throw Error(ErrorCode::Domain, "max_step must be positive");
  std::vector<EvolutionMatrix> out;
  out.reserve(nodes.size());
  Mat u{1.0, 0.0, 0.0, 1.0};
  double t = t0;
  for (double target : nodes) {
    if (target < t) {
      throw TimedError(ErrorCode::Range, describe_time("evolution nodes must be sorted and >= t0", target), target);
    }
    const double span = target - t;
    if (span > 0.0) {
      const auto substeps = static_cast<std::size_t>(std::ceil(span / max_step - 1e-9));
      const double h = span / static_cast<double>(std::max<std::size_t>(substeps, 1));
      for (std::size_t k = 0; k < std::max<std::size_t>(substeps, 1); ++k) {
        u = rk4_step(field, t + h * static_cast<double>(k), h, u);
      }
      t = target;
    }
    out.push_back(to_matrix(u, target, t0));
  }
  return out;
}

const char* to_string(Stability s) noexcept {
  switch (s) {
    case Stability::Focusing: return "Focusing";
    case Stability::Edge: return "Edge";
    case Stability::Defocusing: return "Defocusing";
  }
  return "?";
}

StabilityClass classify_stability(const EvolutionMatrix& u, double tol) {
  StabilityClass out;
  out.gamma = u.trace();
  const std::complex<double> disc = std::sqrt(std::complex<double>(out.gamma * out.gamma - 4.0, 0.0));
  out.kappa = {(out.gamma + disc) / 2.0, (out.gamma - disc) / 2.0};
  const double excess = std::abs(out.gamma) - 2.0;
  if (std::abs(excess) <= tol) {
    out.tag = Stability::Edge;
  } else if (excess > 0.0) {
    out.tag = Stability::Defocusing;
  } else {
    out.tag = Stability::Focusing;
  }
  return out;
}

EvolutionMatrix closed_form_u(const ThetaAnsatz& theta, double t, Convention convention) {
  const double th = theta.value(t);
  const double dth = theta.derivative(t, 1);
  const double divisor = convention == Convention::Det1 ? 1.0 : 2.0;
  double lower;
  if (std::abs(th) < kThetaZeroWindow) {
    if (std::abs(std::abs(dth) - 1.0) > kUnitSlopeTol) {
      throw TimedError(ErrorCode::Singularity, describe_time("inadmissible theta: zero with |thetadot| != 1", t), t);
    }
    // (thetadot^2 - 1) / theta -> 2 thetaddot at an admissible zero.
    lower = 2.0 * theta.derivative(t, 2) / divisor;
  } else {
    lower = (dth * dth - 1.0) / (divisor * th);
  }
  return {dth, th, lower, dth, t, std::numeric_limits<double>::quiet_NaN()};
}

double beta_from_theta(const ThetaAnsatz& theta, double t) {
  const double th = theta.value(t);
  const double dth = theta.derivative(t, 1);
  if (std::abs(th) < kThetaZeroWindow) {
    if (std::abs(std::abs(dth) - 1.0) > kUnitSlopeTol) {
      throw TimedError(ErrorCode::Singularity, describe_time("beta is singular where theta vanishes", t), t);
    }
    return -dth * theta.derivative(t, 3);
  }
  return (dth * dth - 1.0) / (th * th) - 2.0 * theta.derivative(t, 2) / th;
}

ThetaValidityReport validate_theta(const ThetaAnsatz& theta, const TimeGrid& grid, double tol) {
  ThetaValidityReport report;
  const auto nodes = grid.nodes();
  for (double t : nodes) {
    const double v = theta.value(t);
    if (!std::isfinite(v) || std::abs(v) > 1e6) report.bounded = false;
  }

  auto th = [&](double t) { return theta.value(t); };
  for (double t : locate_roots(th, nodes)) {
    const double slope = theta.derivative(t, 1);
    report.zero_crossings.emplace_back(t, slope);
    if (std::abs(std::abs(slope) - 1.0) > tol) report.admissible = false;
  }

  auto dth = [&](double t) { return theta.derivative(t, 1); };
  for (double t : locate_roots(dth, nodes)) {
    const double value = theta.value(t);
    if (std::abs(value) < kThetaZeroWindow) continue;
    double beta, beta_rate;
    try {
      constexpr double h = 1e-5;
      beta = beta_from_theta(theta, t);
      beta_rate = (beta_from_theta(theta, t + h) - beta_from_theta(theta, t - h)) / (2.0 * h);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(beta) < kThetaZeroWindow) continue;
    if (std::abs(beta_rate) > 1e-4 * std::max(1.0, std::abs(beta))) continue;
    const double jerk = theta.derivative(t, 3);
    report.steady_points.emplace_back(t, jerk);
    if (std::abs(jerk) > tol) report.admissible = false;
  }
  if (!report.bounded) report.admissible = false;
  return report;
}

double admissibility_violation(const ThetaAnsatz& theta, const TimeGrid& grid) {
  auto th = [&](double t) { return theta.value(t); };
  double total = 0.0;
  for (double t : locate_roots(th, grid.nodes())) total += std::abs(std::abs(theta.derivative(t, 1)) - 1.0);
  return total;
}

LoopDistance loop_distance(const EvolutionMatrix& u) noexcept {
  const EvolutionMatrix plus = EvolutionMatrix::identity(u.t0);
  const EvolutionMatrix minus{-1.0, 0.0, 0.0, -1.0, u.t0, u.t0};
  return {max_abs_diff(u, plus), max_abs_diff(u, minus)};
}

bool detect_loop(const EvolutionMatrix& u, double tol) { return loop_distance(u).best() <= tol; }

double oscillator_residual(const ThetaAnsatz& theta, const ElasticField& field, const TimeGrid& grid) {
  double worst = 0.0;
  for (double t : grid.nodes()) {
    const double th = theta.value(t);
    if (std::abs(th) < kThetaZeroWindow) continue;
    const double dth = theta.derivative(t, 1);
    const double r = theta.derivative(t, 2) + 0.5 * field(t) * th - (dth * dth - 1.0) / (2.0 * th);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace ionlearn
