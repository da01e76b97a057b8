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

#include "ionlearn/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "ionlearn/csv.hpp"
#include "ionlearn/rng.hpp"

namespace ionlearn {
namespace {

constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kSplitStream = 2;

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Cut point at sorted position pos = n k / classes.
double cutoff(const std::vector<double>& sorted, std::size_t k, std::size_t classes) {
  const std::size_t n = sorted.size();
  const std::size_t num = n * k;
  const std::size_t pos = num / classes;
  if (num % classes == 0) return 0.5 * (sorted[pos - 1] + sorted[pos]);
  return sorted[pos];
}

// Splits `total` train slots across groups proportionally to their sizes.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& sizes, double ratio, std::size_t total) {
  std::vector<std::size_t> quota(sizes.size());
  std::vector<double> remainder(sizes.size());
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    const double exact = ratio * static_cast<double>(sizes[g]);
    quota[g] = static_cast<std::size_t>(std::floor(exact));
    remainder[g] = exact - static_cast<double>(quota[g]);
    assigned += quota[g];
  }
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total && i < order.size(); ++i) {
    if (quota[order[i]] < sizes[order[i]]) {
      ++quota[order[i]];
      ++assigned;
    }
  }
  return quota;
}

void assign_groups(Dataset& ds, const std::vector<std::vector<std::size_t>>& groups, double ratio, Rng& rng) {
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) sizes.push_back(g.size());
  const auto total = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(ds.size())));
  const auto quota = apportion(sizes, ratio, total);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<std::size_t> members = groups[g];
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t i = 0; i < members.size(); ++i) {
      ds.records[members[i]].split = i < quota[g] ? Split::Train : Split::Test;
    }
  }
}

}  // namespace

Trajectory evolve_canonical(const ElasticField& field, CanonicalPair q0, const TimeGrid& grid, Interval interval,
                            std::size_t steps) {
  if (!(interval.t_max > interval.t_min) || steps < 2) {
    throw Error(ErrorCode::Domain, "evolution needs a nonempty interval and at least 2 steps");
  }
  constexpr double slack = 1e-12;
  for (double t : grid.nodes()) {
    if (t < interval.t_min - slack || t > interval.t_max + slack) {
      throw TimedError(ErrorCode::Range, "grid node outside the integrated interval", t);
    }
  }
  std::vector<double> nodes(grid.nodes().begin(), grid.nodes().end());
  for (double& t : nodes) t = std::clamp(t, interval.t_min, interval.t_max);
  const auto path = evolve_to_nodes(field, interval.t_min, nodes, interval.length() / static_cast<double>(steps));

  Trajectory out;
  out.q0 = q0;
  out.t.assign(grid.nodes().begin(), grid.nodes().end());
  out.x.reserve(path.size());
  out.p.reserve(path.size());
  for (const auto& u : path) {
    const auto q = u.apply(q0);
    out.x.push_back(q.x);
    out.p.push_back(q.p);
  }
  return out;
}

bool Dataset::has_labels() const noexcept {
  return !records.empty() && std::all_of(records.begin(), records.end(), [](const Record& r) { return r.label.has_value(); });
}

bool Dataset::has_x_coord() const noexcept {
  return !records.empty() && std::all_of(records.begin(), records.end(), [](const Record& r) { return r.x_coord.has_value(); });
}

bool Dataset::has_split() const noexcept {
  return !records.empty() && std::all_of(records.begin(), records.end(), [](const Record& r) { return r.split.has_value(); });
}

std::size_t Dataset::count(Split s) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [s](const Record& r) { return r.split == s; }));
}

std::vector<Record> Dataset::select(SplitSelector which) const {
  if (which == SplitSelector::All) return records;
  const Split wanted = which == SplitSelector::Train ? Split::Train : Split::Test;
  std::vector<Record> out;
  for (const auto& r : records) {
    if (r.split == wanted) out.push_back(r);
  }
  return out;
}

std::vector<double> add_noise(std::span<const double> values, double fraction, std::uint64_t seed,
                              Warnings* warnings) {
  if (!(fraction >= 0.0) || !std::isfinite(fraction)) throw Error(ErrorCode::Domain, "noise fraction must be >= 0");
  std::vector<double> out(values.begin(), values.end());
  if (fraction == 0.0 || values.empty()) return out;
  const double sd = sample_sd(values);
  if (sd == 0.0) {
    warn(warnings, "add_noise: input has zero standard deviation; returned unchanged");
    return out;
  }
  Rng rng(seed);
  const double sigma = fraction * sd;
  for (double& v : out) v += sigma * rng.normal();
  return out;
}

double median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::Domain, "median of an empty vector");
  const auto s = sorted_copy(values);
  const std::size_t n = s.size();
  return n % 2 == 1 ? s[n / 2] : 0.5 * (s[n / 2 - 1] + s[n / 2]);
}

std::vector<int> label_by_median(std::span<const double> values) {
  const double m = median(values);
  std::vector<int> labels(values.size());
  std::transform(values.begin(), values.end(), labels.begin(), [m](double v) { return v >= m ? 1 : 0; });
  return labels;
}

std::vector<int> label_by_quantiles(std::span<const double> values, int n_classes) {
  if (n_classes < 2) throw Error(ErrorCode::Domain, "need at least 2 classes");
  const auto sorted = sorted_copy(values);
  std::vector<double> uniq = sorted;
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (static_cast<std::size_t>(n_classes) > uniq.size()) {
    throw Error(ErrorCode::Domain, "more classes than distinct values");
  }
  const auto classes = static_cast<std::size_t>(n_classes);
  std::vector<double> cuts;
  for (std::size_t k = 1; k < classes; ++k) cuts.push_back(cutoff(sorted, k, classes));
  std::vector<int> labels(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    int label = 0;
    for (double c : cuts) label += values[i] >= c ? 1 : 0;
    labels[i] = label;
  }
  return labels;
}

Dataset split_dataset(Dataset ds, double ratio, std::uint64_t seed, SplitStrategy strategy, Warnings* warnings) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::Domain, "split ratio must lie in (0, 1)");
  const std::size_t n = ds.size();
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> groups;

  if (strategy == SplitStrategy::Stratified && n > 0) {
    if (ds.has_labels()) {
      int max_label = 0;
      for (const auto& r : ds.records) max_label = std::max(max_label, *r.label);
      groups.assign(static_cast<std::size_t>(max_label) + 1, {});
      for (std::size_t i = 0; i < n; ++i) groups[static_cast<std::size_t>(*ds.records[i].label)].push_back(i);
      const bool empty_class =
          std::any_of(groups.begin(), groups.end(), [](const auto& g) { return g.empty(); });
      if (empty_class) {
        warn(warnings, "split_dataset: empty class under stratification; falling back to shuffled");
        groups.clear();
      }
    } else {
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return ds.records[a].t < ds.records[b].t; });
      const std::size_t deciles = std::min<std::size_t>(10, n);
      groups.assign(deciles, {});
      for (std::size_t r = 0; r < n; ++r) groups[r * deciles / n].push_back(order[r]);
    }
  }
  if (groups.empty()) {
    groups.emplace_back(n);
    std::iota(groups.front().begin(), groups.front().end(), 0);
  }
  assign_groups(ds, groups, ratio, rng);
  return ds;
}

Dataset generate_dataset(const DatasetSpec& spec, Warnings* warnings) {
  if (spec.n_points < 2) throw Error(ErrorCode::Domain, "need at least 2 time points");
  const auto grid = TimeGrid::uniform(spec.interval.t_min, spec.interval.t_max, spec.n_points);
  const auto traj = evolve_canonical(spec.field, spec.q0, grid, spec.interval, spec.steps);
  const auto& clean = spec.observable == Observable::Position ? traj.x : traj.p;
  const auto noisy = add_noise(clean, spec.noise_fraction, derive_seed(spec.seed, kNoiseStream), warnings);

  Dataset ds;
  ds.provenance.seed = spec.seed;
  ds.provenance.noise_fraction = spec.noise_fraction;
  ds.provenance.field = spec.field;
  ds.provenance.q0 = spec.q0;
  ds.provenance.interval = spec.interval;
  ds.records.resize(noisy.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    ds.records[i].t = traj.t[i];
    ds.records[i].target = noisy[i];
  }
  if (spec.labeling != Labeling::None) {
    const auto labels = spec.labeling == Labeling::Median ? label_by_median(noisy)
                                                          : label_by_quantiles(noisy, spec.n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) ds.records[i].label = labels[i];
  }
  return split_dataset(std::move(ds), spec.train_ratio, derive_seed(spec.seed, kSplitStream), spec.strategy,
                       warnings);
}

void write_dataset_csv(const Dataset& ds, std::ostream& os) {
  const bool with_x = ds.has_x_coord();
  const bool with_label = ds.has_labels();
  const bool with_split = ds.has_split();
  os << "t";
  if (with_x) os << ",x_coord";
  os << ",target";
  if (with_label) os << ",label";
  if (with_split) os << ",split";
  os << '\n';
  for (const auto& r : ds.records) {
    os << csv::format_real(r.t);
    if (with_x) os << ',' << csv::format_real(*r.x_coord);
    os << ',' << csv::format_real(r.target);
    if (with_label) os << ',' << *r.label;
    if (with_split) os << ',' << (*r.split == Split::Train ? "train" : "test");
    os << '\n';
  }
}

Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::Io, "dataset CSV is empty");
  const auto header = csv::split_line(line);
  int col_t = -1, col_x = -1, col_target = -1, col_label = -1, col_split = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = header[i];
    const int idx = static_cast<int>(i);
    if (name == "t") col_t = idx;
    else if (name == "x_coord") col_x = idx;
    else if (name == "target") col_target = idx;
    else if (name == "label") col_label = idx;
    else if (name == "split") col_split = idx;
    else throw Error(ErrorCode::Io, "unknown dataset column '" + std::string(name) + "'");
  }
  if (col_t < 0 || col_target < 0) throw Error(ErrorCode::Io, "dataset CSV needs t and target columns");

  Dataset ds;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = csv::split_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::Io, "dataset CSV line " + std::to_string(line_no) + " has the wrong column count");
    }
    Record r;
    r.t = csv::parse_real(cells[static_cast<std::size_t>(col_t)]);
    r.target = csv::parse_real(cells[static_cast<std::size_t>(col_target)]);
    if (col_x >= 0) r.x_coord = csv::parse_real(cells[static_cast<std::size_t>(col_x)]);
    if (col_label >= 0) r.label = static_cast<int>(csv::parse_integer(cells[static_cast<std::size_t>(col_label)]));
    if (col_split >= 0) {
      const auto s = cells[static_cast<std::size_t>(col_split)];
      if (s == "train") r.split = Split::Train;
      else if (s == "test") r.split = Split::Test;
      else throw Error(ErrorCode::Io, "bad split value on line " + std::to_string(line_no));
    }
    ds.records.push_back(r);
  }
  return ds;
}

namespace csv {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(std::string_view text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::Io, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

long long parse_integer(std::string_view text) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
    throw Error(ErrorCode::Io, "not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

}  // namespace csv
}  // namespace ionlearn
