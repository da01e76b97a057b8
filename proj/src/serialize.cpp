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

#include "ionlearn/serialize.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ionlearn/csv.hpp"
#include "ionlearn/error.hpp"

namespace ionlearn {
namespace {

Json pair_json(double a, double b) { return Json::array({a, b}); }

std::pair<double, double> json_pair(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::Config, std::string(what) + " must be a two-element numeric array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> json_reals(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::Config, std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::Config, std::string(what) + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Task task_from_string(const std::string& s) {
  if (s == "regression") return Task::Regression;
  if (s == "classification") return Task::Classification;
  if (s == "density") return Task::Density;
  throw Error(ErrorCode::Config, "unknown task '" + s + "'");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + path);
  return os;
}

}  // namespace

Json field_to_json(const ElasticField& field) {
  switch (field.kind()) {
    case ElasticField::Kind::Constant: return {{"kind", "constant"}, {"value", field.terms().front().amplitude}};
    case ElasticField::Kind::HarmonicSeries: {
      Json terms = Json::array();
      for (const auto& t : field.terms()) terms.push_back(pair_json(t.amplitude, t.frequency));
      return {{"kind", "harmonic"}, {"terms", terms}};
    }
    case ElasticField::Kind::CustomProfile: break;
  }
  throw Error(ErrorCode::Config, "custom field profiles cannot be serialized");
}

ElasticField field_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCode::Config, "field needs a string 'kind'");
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "four_wave") return ElasticField::four_wave();
  if (kind == "constant") {
    if (!j.contains("value") || !j["value"].is_number()) throw Error(ErrorCode::Config, "constant field needs 'value'");
    return ElasticField::constant(j["value"].get<double>());
  }
  if (kind == "harmonic") {
    if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty()) {
      throw Error(ErrorCode::Config, "harmonic field needs a nonempty 'terms' array");
    }
    std::vector<HarmonicTerm> terms;
    for (const auto& t : j["terms"]) {
      const auto [amp, freq] = json_pair(t, "field term");
      terms.push_back({amp, freq});
    }
    return ElasticField::harmonic(std::move(terms));
  }
  throw Error(ErrorCode::Config, "unknown field kind '" + kind + "'");
}

Json theta_to_json(const ThetaAnsatz& theta) {
  Json j{{"coeffs", theta.coeffs()}};
  if (theta.base_frequency() != 1.0) j["omega"] = theta.base_frequency();
  return j;
}

ThetaAnsatz theta_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("coeffs")) throw Error(ErrorCode::Config, "theta needs 'coeffs'");
  auto coeffs = json_reals(j["coeffs"], "theta coeffs");
  if (coeffs.empty()) throw Error(ErrorCode::Config, "theta coeffs must be nonempty");
  const double omega = j.contains("omega") ? j["omega"].get<double>() : 1.0;
  return ThetaAnsatz(std::move(coeffs), omega);
}

Json provenance_to_json(const Provenance& p) {
  Json j{{"schema", kSchemaVersion},
         {"seed", p.seed},
         {"noise_fraction", p.noise_fraction},
         {"q0", pair_json(p.q0.x, p.q0.p)},
         {"interval", pair_json(p.interval.t_min, p.interval.t_max)}};
  j["field"] = p.field ? field_to_json(*p.field) : Json(nullptr);
  if (p.covariance) j["covariance"] = *p.covariance;
  return j;
}

Provenance provenance_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Config, "provenance must be an object");
  Provenance p;
  if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("noise_fraction")) p.noise_fraction = j["noise_fraction"].get<double>();
  if (j.contains("q0")) {
    const auto [x, v] = json_pair(j["q0"], "q0");
    p.q0 = {x, v};
  }
  if (j.contains("interval")) {
    const auto [a, b] = json_pair(j["interval"], "interval");
    p.interval = {a, b};
  }
  if (j.contains("field") && !j["field"].is_null()) p.field = field_from_json(j["field"]);
  if (j.contains("covariance") && !j["covariance"].is_null()) {
    const auto c = json_reals(j["covariance"], "covariance");
    if (c.size() != 3) throw Error(ErrorCode::Config, "covariance needs [xx, xp, pp]");
    p.covariance = Covariance{c[0], c[1], c[2]};
  }
  return p;
}

Json metrics_to_json(const MetricMap& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m.values) j[k] = v;
  if (m.confusion) j["confusion"] = *m.confusion;
  if (m.roc) {
    Json roc = Json::array();
    for (const auto& p : *m.roc) {
      roc.push_back(Json::array({p.fpr, p.tpr, std::isfinite(p.threshold) ? Json(p.threshold) : Json(nullptr)}));
    }
    j["roc"] = roc;
  }
  return j;
}

Json validity_to_json(const ThetaValidityReport& r) {
  Json crossings = Json::array(), steady = Json::array();
  for (const auto& [t, v] : r.zero_crossings) crossings.push_back(pair_json(t, v));
  for (const auto& [t, v] : r.steady_points) steady.push_back(pair_json(t, v));
  return {{"bounded", r.bounded}, {"admissible", r.admissible}, {"zero_crossings", crossings}, {"steady_points", steady}};
}

Json trace_to_json(const OptimizationTrace& trace) {
  Json evals = Json::array();
  for (const auto& e : trace.evaluations) {
    evals.push_back({{"params", e.params}, {"cost", e.cost}, {"fallback", e.fallback}});
  }
  return {{"evaluations", evals}, {"best_index", trace.best_index}, {"stop_reason", to_string(trace.stop_reason)}};
}

TrainedModel TrainedModel::from_report(const FitReport& report) {
  return {report.task, ThetaAnsatz(report.best_params), report.q0, 0.5, report.calibration, report.covariance};
}

Json model_to_json(const TrainedModel& m) {
  Json j{{"task", to_string(m.task)},
         {"theta", theta_to_json(m.theta)},
         {"q0", pair_json(m.q0.x, m.q0.p)},
         {"threshold", m.threshold}};
  j["calibration"] = m.calibration ? Json{{"scale", m.calibration->scale}, {"bias", m.calibration->bias}} : Json(nullptr);
  j["covariance"] = m.covariance ? Json(*m.covariance) : Json(nullptr);
  return j;
}

TrainedModel model_from_json(const Json& j) {
  const Json& m = j.contains("model") ? j["model"] : j;
  if (!m.is_object() || !m.contains("task") || !m.contains("theta")) {
    throw Error(ErrorCode::Config, "model document needs 'task' and 'theta'");
  }
  TrainedModel out;
  out.task = task_from_string(m["task"].get<std::string>());
  out.theta = theta_from_json(m["theta"]);
  if (m.contains("q0")) {
    const auto [x, p] = json_pair(m["q0"], "q0");
    out.q0 = {x, p};
  }
  if (m.contains("threshold")) out.threshold = m["threshold"].get<double>();
  if (m.contains("calibration") && !m["calibration"].is_null()) {
    out.calibration = Calibration{m["calibration"].at("scale").get<double>(), m["calibration"].at("bias").get<double>()};
  }
  if (m.contains("covariance") && !m["covariance"].is_null()) {
    const auto c = json_reals(m["covariance"], "covariance");
    if (c.size() != 3) throw Error(ErrorCode::Config, "covariance needs [xx, xp, pp]");
    out.covariance = Covariance{c[0], c[1], c[2]};
  }
  if (out.task == Task::Density && !out.covariance) throw Error(ErrorCode::Config, "density model needs 'covariance'");
  return out;
}

Json fit_report_to_json(const FitReport& report) {
  Json history = Json::array();
  for (const auto& [i, c] : report.history) history.push_back(Json::array({i, c}));
  return {{"schema", kSchemaVersion},
          {"task", to_string(report.task)},
          {"best_params", report.best_params},
          {"best_cost", report.best_cost},
          {"iterations_run", report.iterations_run},
          {"stop_reason", to_string(report.stop_reason)},
          {"seed", report.seed},
          {"train_metrics", metrics_to_json(report.train_metrics)},
          {"test_metrics", metrics_to_json(report.test_metrics)},
          {"history", history},
          {"theta_validity", validity_to_json(report.theta_validity)},
          {"model", model_to_json(TrainedModel::from_report(report))}};
}

std::vector<PredictionRow> predict_records(const TrainedModel& model, const std::vector<Record>& records,
                                           bool with_truth, std::optional<MomentumMode> momentum) {
  if (momentum && model.task == Task::Density) {
    throw Error(ErrorCode::Domain, "momentum prediction is not defined for density models");
  }
  const RegressionModel position{model.theta, model.q0, momentum.value_or(MomentumMode::Derivative)};
  std::vector<PredictionRow> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    PredictionRow row;
    row.t = r.t;
    switch (model.task) {
      case Task::Regression: {
        if (with_truth) row.y_true = r.target;
        row.y_pred = predict_position(position, r.t);
        break;
      }
      case Task::Classification: {
        const ClassifierModel c{model.theta, model.q0, model.threshold, model.calibration};
        if (with_truth) row.y_true = r.label ? static_cast<double>(*r.label) : r.target;
        row.y_pred = class_score(c, r.t);
        row.prob = sigmoid(row.y_pred);
        row.label_pred = *row.prob >= model.threshold ? 1 : 0;
        break;
      }
      case Task::Density: {
        if (!r.x_coord) throw Error(ErrorCode::Domain, "density prediction needs x_coord");
        row.x_coord = r.x_coord;
        if (with_truth) row.y_true = r.target;
        row.y_pred = predict_density(model.theta, GaussianState{model.q0, *model.covariance}, r.t, *r.x_coord);
        break;
      }
    }
    if (momentum) row.p_pred = predict_momentum(position, r.t);
    rows.push_back(row);
  }
  return rows;
}

PointTable read_points_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::Io, "points file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header_views = csv::split_line(line);
  const std::vector<std::string> header(header_views.begin(), header_views.end());
  int ti = -1, xi = -1, yi = -1, li = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "t") ti = i;
    else if (header[i] == "x_coord") xi = i;
    else if (header[i] == "target") yi = i;
    else if (header[i] == "label") li = i;
  }
  if (ti < 0) throw Error(ErrorCode::Io, "points file needs a 't' column");
  PointTable out;
  out.has_target = yi >= 0;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = csv::split_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::Io, "points file line " + std::to_string(lineno) + ": wrong column count");
    }
    Record r;
    r.t = csv::parse_real(cells[ti]);
    if (xi >= 0) r.x_coord = csv::parse_real(cells[xi]);
    if (yi >= 0) r.target = csv::parse_real(cells[yi]);
    if (li >= 0) r.label = static_cast<int>(csv::parse_integer(cells[li]));
    out.records.push_back(r);
  }
  return out;
}

void write_predictions_csv(const std::vector<PredictionRow>& rows, std::ostream& os) {
  const bool with_x = !rows.empty() && rows.front().x_coord.has_value();
  const bool with_truth = !rows.empty() && rows.front().y_true.has_value();
  const bool with_p = !rows.empty() && rows.front().p_pred.has_value();
  const bool with_prob = !rows.empty() && rows.front().prob.has_value();
  os << "t" << (with_x ? ",x_coord" : "") << (with_truth ? ",y_true" : "") << ",y_pred" << (with_p ? ",p_pred" : "")
     << (with_prob ? ",prob,label_pred" : "") << '\n';
  for (const auto& r : rows) {
    os << csv::format_real(r.t);
    if (with_x) os << ',' << csv::format_real(*r.x_coord);
    if (with_truth) os << ',' << csv::format_real(*r.y_true);
    os << ',' << csv::format_real(r.y_pred);
    if (with_p) os << ',' << csv::format_real(*r.p_pred);
    if (with_prob) os << ',' << csv::format_real(*r.prob) << ',' << *r.label_pred;
    os << '\n';
  }
}

void write_evolution_csv(const std::vector<EvolutionMatrix>& path, std::ostream& os) {
  os << "t,u11,u12,u21,u22,det,gamma\n";
  for (const auto& u : path) {
    os << csv::format_real(u.t) << ',' << csv::format_real(u.u11) << ',' << csv::format_real(u.u12) << ','
       << csv::format_real(u.u21) << ',' << csv::format_real(u.u22) << ',' << csv::format_real(u.det()) << ','
       << csv::format_real(u.trace()) << '\n';
  }
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,x,p\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    os << csv::format_real(traj.t[i]) << ',' << csv::format_real(traj.x[i]) << ',' << csv::format_real(traj.p[i])
       << '\n';
  }
}

void write_roc_csv(const std::vector<RocPoint>& roc, std::ostream& os) {
  os << "fpr,tpr,threshold\n";
  for (const auto& p : roc) {
    os << csv::format_real(p.fpr) << ',' << csv::format_real(p.tpr) << ','
       << (std::isfinite(p.threshold) ? csv::format_real(p.threshold) : std::string("inf")) << '\n';
  }
}

std::string sidecar_path(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".json").string();
}

void save_dataset(const Dataset& ds, const std::string& csv_path) {
  {
    auto os = open_out(csv_path);
    write_dataset_csv(ds, os);
  }
  write_text_file(sidecar_path(csv_path), provenance_to_json(ds.provenance).dump(2) + "\n");
}

Dataset load_dataset(const std::string& csv_path) {
  std::ifstream is(csv_path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot read " + csv_path);
  Dataset ds = read_dataset_csv(is);
  const auto side = sidecar_path(csv_path);
  if (side != csv_path && std::filesystem::exists(side)) ds.provenance = provenance_from_json(read_json_file(side));
  return ds;
}

namespace {

template <typename T>
T value_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorCode::Config, std::string("config key '") + key + "' has the wrong type");
  }
}

std::uint64_t run_seed(const Json& j) { return value_or<std::uint64_t>(j, "seed", 0); }

SplitStrategy strategy_from(const Json& j) {
  const Json split = j.contains("split") ? j["split"] : Json::object();
  const auto s = value_or<std::string>(split, "strategy", "stratified");
  if (s == "stratified") return SplitStrategy::Stratified;
  if (s == "shuffled") return SplitStrategy::Shuffled;
  throw Error(ErrorCode::Config, "unknown split strategy '" + s + "'");
}

double ratio_from(const Json& j) {
  const Json split = j.contains("split") ? j["split"] : Json::object();
  return value_or<double>(split, "ratio", 0.8);
}

Interval interval_from(const Json& j) {
  if (!j.contains("interval")) return kDefaultInterval;
  const auto [a, b] = json_pair(j["interval"], "interval");
  if (!(b > a)) throw Error(ErrorCode::Config, "interval needs t_min < t_max");
  return {a, b};
}

CanonicalPair q0_from(const Json& j) {
  if (!j.contains("q0")) return {1.0, 1.0};
  const auto [x, p] = json_pair(j["q0"], "q0");
  return {x, p};
}

}  // namespace

Task task_from_json(const Json& j) { return task_from_string(value_or<std::string>(j, "task", "regression")); }

std::size_t n_params_from_json(const Json& j) {
  const auto n = value_or<long long>(j, "n_params", 3);
  if (n < 1) throw Error(ErrorCode::Config, "n_params must be >= 1");
  return static_cast<std::size_t>(n);
}

OptimizerConfig optimizer_config_from_json(const Json& j) {
  OptimizerConfig c;
  c.seed = run_seed(j);
  const Json o = j.contains("optimizer") ? j["optimizer"] : Json::object();
  c.budget = value_or<std::size_t>(o, "budget", c.budget);
  c.init_points = value_or<std::size_t>(o, "init_points", c.init_points);
  c.patience = value_or<std::size_t>(o, "patience", c.patience);
  c.min_improvement = value_or<double>(o, "min_improvement", c.min_improvement);
  c.candidates = value_or<std::size_t>(o, "candidates", c.candidates);
  c.seed = value_or<std::uint64_t>(o, "seed", c.seed);
  const auto method = value_or<std::string>(o, "method", "bayes");
  if (method == "bayes") c.method = Method::Bayes;
  else if (method == "random") c.method = Method::Random;
  else throw Error(ErrorCode::Config, "unknown optimizer method '" + method + "'");
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  return c;
}

FitOptions fit_options_from_json(const Json& j) {
  FitOptions f;
  const Json o = j.contains("fit") ? j["fit"] : Json::object();
  if (o.contains("coeff_box")) {
    const auto [lo, hi] = json_pair(o["coeff_box"], "fit.coeff_box");
    if (!(lo < hi)) throw Error(ErrorCode::Config, "fit.coeff_box needs lo < hi");
    f.coeff_lower = lo;
    f.coeff_upper = hi;
  }
  f.admissibility_penalty = value_or<double>(o, "admissibility_penalty", f.admissibility_penalty);
  f.calibrate = value_or<bool>(o, "calibrate", f.calibrate);
  return f;
}

DatasetSpec dataset_spec_from_json(const Json& j) {
  DatasetSpec s;
  if (j.contains("field")) s.field = field_from_json(j["field"]);
  s.interval = interval_from(j);
  s.n_points = value_or<std::size_t>(j, "n_points", s.n_points);
  s.q0 = q0_from(j);
  s.noise_fraction = value_or<double>(j, "noise_fraction", s.noise_fraction);
  s.seed = run_seed(j);
  s.steps = value_or<std::size_t>(j, "steps", s.steps);
  const auto observable = value_or<std::string>(j, "observable", "position");
  if (observable == "position") s.observable = Observable::Position;
  else if (observable == "momentum") s.observable = Observable::Momentum;
  else throw Error(ErrorCode::Config, "unknown observable '" + observable + "'");
  const Task task = task_from_json(j);
  const auto labeling = value_or<std::string>(j, "labeling", task == Task::Classification ? "median" : "none");
  if (labeling == "none") s.labeling = Labeling::None;
  else if (labeling == "median") s.labeling = Labeling::Median;
  else if (labeling == "quantiles") s.labeling = Labeling::Quantiles;
  else throw Error(ErrorCode::Config, "unknown labeling '" + labeling + "'");
  s.n_classes = value_or<int>(j, "n_classes", s.n_classes);
  s.train_ratio = ratio_from(j);
  s.strategy = strategy_from(j);
  if (s.n_points < 2) throw Error(ErrorCode::Config, "n_points must be >= 2");
  if (!(s.noise_fraction >= 0.0)) throw Error(ErrorCode::Config, "noise_fraction must be >= 0");
  if (!(s.train_ratio > 0.0 && s.train_ratio < 1.0)) throw Error(ErrorCode::Config, "split.ratio must lie in (0, 1)");
  return s;
}

DensityGrids density_spec_from_json(const Json& j) {
  DensitySpec s;
  if (j.contains("field")) s.field = field_from_json(j["field"]);
  s.interval = interval_from(j);
  s.noise_fraction = value_or<double>(j, "noise_fraction", s.noise_fraction);
  s.seed = run_seed(j);
  s.steps = value_or<std::size_t>(j, "steps", s.steps);
  s.train_ratio = ratio_from(j);
  s.strategy = strategy_from(j);
  const Json d = j.contains("density") ? j["density"] : Json::object();
  s.state0.mean = q0_from(j);
  if (d.contains("cov")) {
    const auto c = json_reals(d["cov"], "density.cov");
    if (c.size() != 3) throw Error(ErrorCode::Config, "density.cov needs [xx, xp, pp]");
    s.state0.cov = {c[0], c[1], c[2]};
  }
  try {
    s.state0.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  double x_lo = -6.0, x_hi = 6.0;
  std::size_t x_n = 50;
  if (d.contains("x_grid")) {
    const auto g = json_reals(d["x_grid"], "density.x_grid");
    if (g.size() != 3 || !(g[1] > g[0]) || g[2] < 2) throw Error(ErrorCode::Config, "density.x_grid needs [lo, hi, count]");
    x_lo = g[0];
    x_hi = g[1];
    x_n = static_cast<std::size_t>(g[2]);
  }
  const auto t_n = value_or<std::size_t>(d, "t_points", 50);
  if (t_n < 2) throw Error(ErrorCode::Config, "density.t_points must be >= 2");
  const auto xg = TimeGrid::uniform(x_lo, x_hi, x_n);
  return {s, std::vector<double>(xg.nodes().begin(), xg.nodes().end()),
          TimeGrid::uniform(s.interval.t_min, s.interval.t_max, t_n)};
}

Json read_json_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot read " + path);
  try {
    return Json::parse(is);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Config, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
  if (!os) throw Error(ErrorCode::Io, "failed writing " + path);
}

}  // namespace ionlearn
