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

#ifndef IONLEARN_DATAGEN_HPP
#define IONLEARN_DATAGEN_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "ionlearn/dynamics.hpp"
#include "ionlearn/error.hpp"

namespace ionlearn {

inline constexpr Interval kDefaultInterval{-2.0 * std::numbers::pi, 2.0 * std::numbers::pi};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> p;
  CanonicalPair q0;
};

/// Applies u(t, interval.t_min) to q0 at every grid node. The field is
/// integrated from the start of `interval` with step length(interval) / steps.
Trajectory evolve_canonical(const ElasticField& field, CanonicalPair q0, const TimeGrid& grid,
                            Interval interval = kDefaultInterval, std::size_t steps = kDefaultSteps);

enum class Split : std::uint8_t { Train, Test };
enum class SplitStrategy { Shuffled, Stratified };
enum class SplitSelector { Train, Test, All };

struct Record {
  double t = 0.0;
  std::optional<double> x_coord;
  double target = 0.0;
  std::optional<int> label;
  std::optional<Split> split;
};

/// Symmetric covariance (xx, xp, pp) of a Gaussian packet.
using Covariance = std::array<double, 3>;

/// Where a dataset came from; serialized as the JSON sidecar.
struct Provenance {
  std::uint64_t seed = 0;
  double noise_fraction = 0.0;
  std::optional<ElasticField> field;
  CanonicalPair q0{1.0, 1.0};
  Interval interval = kDefaultInterval;
  std::optional<Covariance> covariance;  // density datasets only
};

struct Dataset {
  std::vector<Record> records;
  Provenance provenance;

  std::size_t size() const noexcept { return records.size(); }
  bool has_labels() const noexcept;
  bool has_x_coord() const noexcept;
  bool has_split() const noexcept;
  std::size_t count(Split s) const noexcept;
  /// Records belonging to the selected split (All ignores assignment).
  std::vector<Record> select(SplitSelector which) const;
};

/// values + eps, eps ~ N(0, (fraction * sd(values))^2) drawn from Rng(seed).
/// A constant input with fraction > 0 is returned unchanged with a warning.
std::vector<double> add_noise(std::span<const double> values, double fraction, std::uint64_t seed,
                              Warnings* warnings = nullptr);

double median(std::span<const double> values);

/// 1 where value >= median, else 0.
std::vector<int> label_by_median(std::span<const double> values);

/// Equal-frequency bands. Cutoff k sits at sorted position n k / N (midpoint of
/// the neighbouring order statistics when that position is integral), so
/// N = 2 reproduces label_by_median exactly.
std::vector<int> label_by_quantiles(std::span<const double> values, int n_classes);

/// Assigns train/test membership. Stratified groups by label when labels are
/// present, otherwise by time decile; quotas use largest-remainder rounding
/// so the train size is round(ratio * n) overall.
Dataset split_dataset(Dataset ds, double ratio, std::uint64_t seed,
                      SplitStrategy strategy = SplitStrategy::Stratified, Warnings* warnings = nullptr);

enum class Observable { Position, Momentum };
enum class Labeling { None, Median, Quantiles };

struct DatasetSpec {
  ElasticField field = ElasticField::four_wave();
  Interval interval = kDefaultInterval;
  std::size_t n_points = 500;
  CanonicalPair q0{1.0, 1.0};
  double noise_fraction = 0.1;
  std::uint64_t seed = 0;
  Observable observable = Observable::Position;
  Labeling labeling = Labeling::None;
  int n_classes = 2;
  double train_ratio = 0.8;
  SplitStrategy strategy = SplitStrategy::Stratified;
  std::size_t steps = kDefaultSteps;
};

/// Trajectory dataset on a uniform grid: evolve, add noise, label (noise
/// first), split. Noise and split draw from streams derived from spec.seed.
Dataset generate_dataset(const DatasetSpec& spec, Warnings* warnings = nullptr);

/// CSV with header t[,x_coord],target[,label][,split]; reals use 17
/// significant digits so a read reproduces every value bit-exactly.
void write_dataset_csv(const Dataset& ds, std::ostream& os);
Dataset read_dataset_csv(std::istream& is);

}  // namespace ionlearn

#endif  // IONLEARN_DATAGEN_HPP
