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

// ionlearn command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ionlearn/ionlearn.h"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ApiError(ionl_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
  ionl_status status;
};

int exit_code_for(ionl_status s) {
  switch (s) {
    case IONL_ERR_INVALID_ARGUMENT:
    case IONL_ERR_DOMAIN:
    case IONL_ERR_IO:
    case IONL_ERR_CONFIG:
      return kExitUsage;
    default:
      return kExitNumerical;
  }
}

void check(ionl_status s) {
  if (s != IONL_OK) throw ApiError(s, std::string(ionl_status_name(s)) + ": " + ionl_last_error());
}

std::string take(char* p) {
  std::string out = p ? p : "";
  ionl_string_free(p);
  return out;
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using FieldPtr = std::unique_ptr<ionl_field, Deleter<ionl_field, ionl_field_free>>;
using ThetaPtr = std::unique_ptr<ionl_theta, Deleter<ionl_theta, ionl_theta_free>>;
using DatasetPtr = std::unique_ptr<ionl_dataset, Deleter<ionl_dataset, ionl_dataset_free>>;
using FitPtr = std::unique_ptr<ionl_fit, Deleter<ionl_fit, ionl_fit_free>>;
using ModelPtr = std::unique_ptr<ionl_model, Deleter<ionl_model, ionl_model_free>>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw UsageError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------- tables

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
  std::vector<double> column(const std::string& name) const {
    std::vector<double> out;
    const int k = index(name);
    if (k < 0) return out;
    for (const auto& r : rows) out.push_back(to_number(r[k]).value_or(std::nan("")));
    return out;
  }
  static std::optional<double> to_number(const std::string& cell) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    return v;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Table parse_table(const std::string& csv) {
  Table t;
  std::istringstream ss(csv);
  std::string line;
  if (std::getline(ss, line)) t.columns = split(line);
  while (std::getline(ss, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

Json table_to_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row = Json::array();
    for (const auto& cell : r) {
      if (const auto v = Table::to_number(cell); v && std::isfinite(*v)) row.push_back(*v);
      else if (cell == "nan" || cell == "inf" || cell == "-inf") row.push_back(nullptr);
      else row.push_back(cell);
    }
    rows.push_back(row);
  }
  return {{"schema", 1}, {"columns", t.columns}, {"rows", rows}};
}

// ---------------------------------------------------------------- run config

Json default_config() {
  return {
      {"field", {{"kind", "four_wave"}}},
      {"interval", {-2.0 * std::numbers::pi, 2.0 * std::numbers::pi}},
      {"n_points", 500},
      {"q0", {1.0, 1.0}},
      {"noise_fraction", 0.1},
      {"n_params", 3},
      {"optimizer",
       {{"budget", 150},
        {"init_points", 10},
        {"patience", 15},
        {"min_improvement", 1e-4},
        {"method", "bayes"},
        {"candidates", 1024}}},
      {"seed", 0},
      {"out", "out"},
      {"format", "csv"},
      {"task", "regression"},
      {"observable", "position"},
      {"n_classes", 2},
      {"split", {{"ratio", 0.8}, {"strategy", "stratified"}}},
      {"steps", 4000},
      {"density", {{"x_grid", {-6.0, 6.0, 50}}, {"t_points", 50}, {"cov", {0.5, 0.0, 0.5}}}},
      {"fit", {{"coeff_box", {-2.0, 2.0}}, {"admissibility_penalty", 0.0}, {"calibrate", false}}},
  };
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw UsageError("unknown config key '" + where + k + "'");
  }
}

void validate_config_keys(const Json& c) {
  check_keys(c,
             {"field", "interval", "n_points", "q0", "noise_fraction", "n_params", "optimizer", "seed", "out",
              "format", "task", "observable", "labeling", "n_classes", "split", "steps", "density", "fit", "theta"},
             "");
  if (c.contains("optimizer")) {
    check_keys(c["optimizer"],
               {"budget", "init_points", "patience", "min_improvement", "method", "candidates", "seed"},
               "optimizer.");
  }
  if (c.contains("split")) check_keys(c["split"], {"ratio", "strategy"}, "split.");
  if (c.contains("density")) check_keys(c["density"], {"x_grid", "t_points", "cov"}, "density.");
  if (c.contains("fit")) check_keys(c["fit"], {"coeff_box", "admissibility_penalty", "calibrate"}, "fit.");
}

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::vector<double> interval;
};

struct Run {
  Json config;
  fs::path out;
  std::string format;
  std::array<double, 2> interval{};
};

Run resolve(const GlobalFlags& g, const Json& overrides, const std::string& command) {
  Json c = default_config();
  if (!g.config_path.empty()) {
    Json file;
    try {
      file = Json::parse(read_file(g.config_path));
    } catch (const Json::parse_error& e) {
      throw UsageError("config '" + g.config_path + "' is not valid JSON: " + e.what());
    }
    validate_config_keys(file);
    for (const auto& [k, v] : file.items()) {
      if (v.is_object() && c.contains(k) && c[k].is_object() && k != "field" && k != "theta") c[k].update(v);
      else c[k] = v;
    }
  }
  for (const auto& [k, v] : overrides.items()) {
    if (v.is_object() && c.contains(k) && c[k].is_object()) c[k].update(v);
    else c[k] = v;
  }
  if (g.seed) c["seed"] = *g.seed;
  if (g.out) c["out"] = *g.out;
  if (g.format) c["format"] = *g.format;
  if (!g.interval.empty()) c["interval"] = g.interval;
  if (!c.contains("labeling")) c["labeling"] = c["task"] == "classification" ? "median" : "none";

  Run run;
  try {
    run.format = c.at("format").get<std::string>();
    run.out = c.at("out").get<std::string>();
    const auto iv = c.at("interval").get<std::vector<double>>();
    if (iv.size() != 2 || !(iv[1] > iv[0])) throw UsageError("interval needs [t_min, t_max] with t_min < t_max");
    run.interval = {iv[0], iv[1]};
    const auto task = c.at("task").get<std::string>();
    if (task != "regression" && task != "classification" && task != "density") {
      throw UsageError("unknown task '" + task + "'");
    }
  } catch (const Json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
  if (run.format != "csv" && run.format != "json" && run.format != "svg") {
    throw UsageError("format must be csv, json or svg");
  }
  std::error_code ec;
  fs::create_directories(run.out, ec);
  if (ec) throw UsageError("cannot create output directory '" + run.out.string() + "': " + ec.message());
  run.config = c;
  write_file(run.out / (command + ".config.json"), c.dump(2) + "\n");
  return run;
}

/// Writes a table as CSV (csv, svg formats) or JSON (json format).
fs::path emit_table(const Run& run, const std::string& stem, const std::string& csv) {
  if (run.format == "json") {
    const auto path = run.out / (stem + ".json");
    write_file(path, table_to_json(parse_table(csv)).dump(2) + "\n");
    return path;
  }
  const auto path = run.out / (stem + ".csv");
  write_file(path, csv);
  return path;
}

void emit_svg(const Run& run, const std::string& stem, const std::string& svg) {
  if (run.format == "svg") write_file(run.out / (stem + ".svg"), svg);
}

FieldPtr field_of(const Run& run) {
  ionl_field* f = nullptr;
  check(ionl_field_from_json(run.config.dump().c_str(), &f));
  return FieldPtr(f);
}

std::size_t steps_of(const Run& run) {
  const auto s = run.config.at("steps").get<long long>();
  if (s < 2) throw UsageError("steps must be >= 2");
  return static_cast<std::size_t>(s);
}

ionl_matrix final_matrix(const ionl_field* field, double t0, double t1, std::size_t steps) {
  std::vector<ionl_matrix> path(steps + 1);
  check(ionl_integrate(field, t0, t1, steps, path.data()));
  return path.back();
}

const char* stability_name(int tag) {
  return tag == IONL_FOCUSING ? "Focusing" : tag == IONL_EDGE ? "Edge" : "Defocusing";
}

Json matrix_json(const ionl_matrix& u) { return Json::array({Json::array({u.u11, u.u12}), Json::array({u.u21, u.u22})}); }

// ---------------------------------------------------------------- commands

int cmd_gen_data(const Run& run) {
  ionl_dataset* raw = nullptr;
  const std::string cfg = run.config.dump();
  if (run.config["task"] == "density") check(ionl_dataset_generate_density(cfg.c_str(), &raw));
  else check(ionl_dataset_generate(cfg.c_str(), &raw));
  DatasetPtr ds(raw);
  const auto path = run.out / "data.csv";
  check(ionl_dataset_save(ds.get(), path.string().c_str()));
  char* w = nullptr;
  check(ionl_dataset_warnings(ds.get(), &w));
  for (const auto& msg : Json::parse(take(w))) std::cerr << "warning: " << msg.get<std::string>() << "\n";
  std::size_t n = 0;
  check(ionl_dataset_size(ds.get(), &n));
  std::cout << "wrote " << path.string() << " (" << n << " rows)\n";
  if (run.format == "svg" && run.config["task"] != "density") {
    char* csv = nullptr;
    check(ionl_dataset_csv(ds.get(), &csv));
    const auto t = parse_table(take(csv));
    emit_svg(run, "data",
             svgplot::render("dataset", "t", "target", {{"target", t.column("t"), t.column("target"), "#1f77b4", true}}));
  }
  return 0;
}

int cmd_evolve(const Run& run) {
  const auto field = field_of(run);
  const auto [t0, t1] = run.interval;
  const auto steps = steps_of(run);
  const auto q0 = run.config.at("q0").get<std::vector<double>>();
  if (q0.size() != 2) throw UsageError("q0 needs [x0, p0]");
  const auto n_points = run.config.at("n_points").get<std::size_t>();

  char* evo = nullptr;
  check(ionl_evolution_csv(field.get(), t0, t1, steps, &evo));
  const std::string evo_csv = take(evo);
  emit_table(run, "evolution", evo_csv);
  char* traj = nullptr;
  check(ionl_trajectory_csv(field.get(), q0[0], q0[1], t0, t1, n_points, steps, &traj));
  const std::string traj_csv = take(traj);
  emit_table(run, "trajectory", traj_csv);

  const auto u = final_matrix(field.get(), t0, t1, steps);
  ionl_stability s{};
  check(ionl_classify_stability(&u, 1e-9, &s));
  double max_det_err = 0.0;
  for (const double d : parse_table(evo_csv).column("det")) max_det_err = std::max(max_det_err, std::abs(d - 1.0));
  const Json summary{{"schema", 1},
                     {"interval", {t0, t1}},
                     {"steps", steps},
                     {"stability", stability_name(s.tag)},
                     {"gamma", s.gamma},
                     {"kappa", {{s.kappa_re[0], s.kappa_im[0]}, {s.kappa_re[1], s.kappa_im[1]}}},
                     {"u_final", matrix_json(u)},
                     {"max_det_error", max_det_err}};
  write_file(run.out / "stability.json", summary.dump(2) + "\n");
  std::printf("stability: %s\ngamma: %.17g\nmax |det u - 1|: %.3g\n", stability_name(s.tag), s.gamma, max_det_err);

  if (run.format == "svg") {
    const auto t = parse_table(traj_csv);
    emit_svg(run, "trajectory",
             svgplot::render("canonical trajectory", "t", "value",
                             {{"x", t.column("t"), t.column("x"), "#1f77b4"}, {"p", t.column("t"), t.column("p"), "#d62728"}}));
  }
  return 0;
}

int cmd_fit(const Run& run, const std::string& data_path) {
  const std::string path = data_path.empty() ? (run.out / "data.csv").string() : data_path;
  if (!fs::exists(path)) throw UsageError("dataset '" + path + "' not found");
  ionl_dataset* raw = nullptr;
  check(ionl_dataset_load(path.c_str(), &raw));
  DatasetPtr ds(raw);
  ionl_fit* fraw = nullptr;
  check(ionl_fit_run(ds.get(), run.config.dump().c_str(), &fraw));
  FitPtr fit(fraw);

  char* rep = nullptr;
  check(ionl_fit_report_json(fit.get(), &rep));
  const Json report = Json::parse(take(rep));
  write_file(run.out / "report.json", report.dump(2) + "\n");
  char* pred = nullptr;
  check(ionl_fit_predictions_csv(fit.get(), ds.get(), &pred));
  const std::string pred_csv = take(pred);
  emit_table(run, "predictions", pred_csv);

  const std::string task = report["task"];
  std::string roc_csv;
  if (task == "classification" && report["test_metrics"].contains("roc")) {
    char* roc = nullptr;
    check(ionl_fit_roc_csv(fit.get(), &roc));
    roc_csv = take(roc);
    emit_table(run, "roc", roc_csv);
  }

  std::printf("task: %s\nstop: %s after %zu evaluations\nbest cost: %.6g\n", task.c_str(),
              report["stop_reason"].get<std::string>().c_str(), report["iterations_run"].get<std::size_t>(),
              report["best_cost"].get<double>());
  for (const auto& [k, v] : report["test_metrics"].items()) {
    if (v.is_number()) std::printf("test %s: %.6g\n", k.c_str(), v.get<double>());
  }
  std::printf("theta admissible: %s\n", report["theta_validity"]["admissible"].get<bool>() ? "true" : "false");

  if (run.format == "svg") {
    const auto p = parse_table(pred_csv);
    if (task == "density") {
      emit_svg(run, "fit",
               svgplot::render("density: target vs prediction", "target", "prediction",
                               {{"records", p.column("y_true"), p.column("y_pred"), "#1f77b4", true}}));
    } else {
      const char* ylabel = task == "classification" ? "score / label" : "x";
      emit_svg(run, "fit",
               svgplot::render(task + " fit", "t", ylabel,
                               {{"data", p.column("t"), p.column("y_true"), "#7f7f7f", true},
                                {"model", p.column("t"), p.column("y_pred"), "#d62728"}}));
    }
    if (!roc_csv.empty()) {
      const auto r = parse_table(roc_csv);
      emit_svg(run, "roc",
               svgplot::render("ROC (test)", "false positive rate", "true positive rate",
                               {{"roc", r.column("fpr"), r.column("tpr"), "#2ca02c"},
                                {"chance", {0.0, 1.0}, {0.0, 1.0}, "#bbbbbb"}}));
    }
  }
  return 0;
}

int cmd_predict(const Run& run, const std::string& model_path, const std::string& times_path,
                const std::string& mode_name) {
  static const std::map<std::string, ionl_momentum_mode> modes{{"matrix_halved", IONL_MOMENTUM_MATRIX_HALVED},
                                                               {"matrix_det1", IONL_MOMENTUM_MATRIX_DET1},
                                                               {"derivative", IONL_MOMENTUM_DERIVATIVE},
                                                               {"none", IONL_MOMENTUM_NONE}};
  const auto it = modes.find(mode_name);
  if (it == modes.end()) throw UsageError("unknown momentum mode '" + mode_name + "'");
  const std::string model_text = read_file(model_path);
  ionl_model* mraw = nullptr;
  check(ionl_model_from_json(model_text.c_str(), &mraw));
  ModelPtr model(mraw);
  ionl_momentum_mode mode = it->second;
  const Json mj = Json::parse(model_text);
  const Json& m = mj.contains("model") ? mj["model"] : mj;
  if (m.value("task", "") == "density") mode = IONL_MOMENTUM_NONE;

  const std::string points = read_file(times_path);
  char* out = nullptr;
  check(ionl_model_predict_csv(model.get(), points.c_str(), mode, &out));
  const std::string csv = take(out);
  const auto path = emit_table(run, "predict", csv);
  std::cout << "wrote " << path.string() << "\n";
  if (run.format == "svg") {
    const auto p = parse_table(csv);
    std::vector<svgplot::Series> series{{"position", p.column("t"), p.column("y_pred"), "#1f77b4"}};
    if (p.index("p_pred") >= 0) series.push_back({"momentum", p.column("t"), p.column("p_pred"), "#d62728"});
    emit_svg(run, "predict", svgplot::render("predictions", "t", "value", series));
  }
  return 0;
}

int cmd_theta_inspect(const Run& run, const std::vector<double>& coeffs, const std::string& model_path,
                      std::size_t nodes, double tol) {
  ionl_theta* traw = nullptr;
  if (!model_path.empty()) check(ionl_theta_from_json(read_file(model_path).c_str(), &traw));
  else if (!coeffs.empty()) check(ionl_theta_create(coeffs.data(), coeffs.size(), &traw));
  else if (run.config.contains("theta")) check(ionl_theta_from_json(run.config.dump().c_str(), &traw));
  else throw UsageError("theta-inspect needs --theta, --model or a config 'theta'");
  ThetaPtr theta(traw);
  if (nodes < 2) throw UsageError("nodes must be >= 2");
  const auto [t0, t1] = run.interval;

  char* rep = nullptr;
  check(ionl_theta_validate(theta.get(), t0, t1, nodes, tol, &rep));
  const Json report = Json::parse(take(rep));
  char* tj = nullptr;
  check(ionl_theta_to_json(theta.get(), &tj));
  const Json doc{{"schema", 1},
                 {"theta", Json::parse(take(tj))},
                 {"interval", {t0, t1}},
                 {"nodes", nodes},
                 {"tol", tol},
                 {"report", report}};
  write_file(run.out / "theta_validity.json", doc.dump(2) + "\n");

  std::string csv = "t,beta\n";
  std::vector<double> ts, betas;
  char buf[64];
  for (std::size_t i = 0; i < nodes; ++i) {
    const double t = i + 1 == nodes ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(nodes - 1);
    double beta = std::nan("");
    if (ionl_beta_from_theta(theta.get(), t, &beta) != IONL_OK) beta = std::nan("");
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, beta);
    csv += buf;
    ts.push_back(t);
    betas.push_back(beta);
  }
  emit_table(run, "beta", csv);
  std::printf("admissible: %s\nbounded: %s\nzero crossings: %zu\nsteady points: %zu\n",
              report["admissible"].get<bool>() ? "true" : "false", report["bounded"].get<bool>() ? "true" : "false",
              report["zero_crossings"].size(), report["steady_points"].size());
  emit_svg(run, "beta", svgplot::render("reconstructed elastic field", "t", "beta", {{"beta", ts, betas, "#9467bd"}}));
  return 0;
}

int cmd_loop_check(const Run& run, double tol) {
  const auto field = field_of(run);
  const auto [t0, t1] = run.interval;
  const auto steps = steps_of(run);
  const auto u = final_matrix(field.get(), t0, t1, steps);
  double d_plus = 0.0, d_minus = 0.0;
  check(ionl_loop_distance(&u, &d_plus, &d_minus));
  const bool plus = d_plus <= d_minus;
  const double distance = plus ? d_plus : d_minus;
  const bool loop = distance <= tol;
  const Json doc{{"schema", 1},
                 {"interval", {t0, t1}},
                 {"steps", steps},
                 {"tol", tol},
                 {"loop", loop},
                 {"sign", plus ? 1 : -1},
                 {"distance", distance},
                 {"distance_to_identity", d_plus},
                 {"distance_to_minus_identity", d_minus},
                 {"u_final", matrix_json(u)}};
  write_file(run.out / "loop.json", doc.dump(2) + "\n");
  std::printf("loop: %s\nsign: %s\ndistance: %.17g\n", loop ? "true" : "false", plus ? "+1" : "-1", distance);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning the dynamics of a trapped ion in a time-dependent field."};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(ionl_version()));

  GlobalFlags g;
  app.add_option("--config", g.config_path, "Run config JSON");
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "json", "svg"}));
  app.add_option("--interval", g.interval, "t_min t_max")->expected(2);

  Json overrides = Json::object();

  auto* gen = app.add_subcommand("gen-data", "Generate a dataset and its provenance sidecar");
  std::optional<std::string> gen_task, labeling;
  std::optional<double> noise;
  std::optional<std::size_t> n_points;
  std::optional<int> n_classes;
  gen->add_option("--task", gen_task)->check(CLI::IsMember({"regression", "classification", "density"}));
  gen->add_option("--noise", noise, "Noise as a fraction of the sample standard deviation");
  gen->add_option("--n-points", n_points);
  gen->add_option("--labeling", labeling)->check(CLI::IsMember({"none", "median", "quantiles"}));
  gen->add_option("--n-classes", n_classes);

  auto* evolve = app.add_subcommand("evolve", "Integrate the evolution matrix and report stability");
  std::optional<std::size_t> steps;
  evolve->add_option("--steps", steps);
  evolve->add_option("--n-points", n_points);

  auto* fit = app.add_subcommand("fit", "Fit a model to a dataset");
  std::optional<std::string> fit_task, method;
  std::string data_path;
  std::optional<std::size_t> budget;
  fit->add_option("--task", fit_task)->check(CLI::IsMember({"regression", "classification", "density"}));
  fit->add_option("--data", data_path, "Dataset CSV (default <out>/data.csv)");
  fit->add_option("--budget", budget);
  fit->add_option("--method", method)->check(CLI::IsMember({"bayes", "random"}));

  auto* predict = app.add_subcommand("predict", "Predict with a fitted model");
  std::string model_path, times_path, momentum_mode = "derivative";
  predict->add_option("--model", model_path, "Model or fit report JSON")->required();
  predict->add_option("--times", times_path, "CSV of query points with a 't' column")->required();
  predict->add_option("--momentum-mode", momentum_mode)
      ->check(CLI::IsMember({"matrix_halved", "matrix_det1", "derivative", "none"}));

  auto* inspect = app.add_subcommand("theta-inspect", "Check a theta ansatz and reconstruct its field");
  std::vector<double> coeffs;
  std::string inspect_model;
  std::size_t nodes = 2001;
  double theta_tol = 1e-6;
  inspect->add_option("--theta", coeffs, "Coefficients a1 a3 ...")->delimiter(',');
  inspect->add_option("--model", inspect_model, "Model or fit report JSON");
  inspect->add_option("--nodes", nodes);
  inspect->add_option("--tol", theta_tol);

  auto* loop = app.add_subcommand("loop-check", "Test whether the evolution returns to +-identity");
  double loop_tol = 1e-6;
  loop->add_option("--steps", steps);
  loop->add_option("--tol", loop_tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (noise) overrides["noise_fraction"] = *noise;
  if (n_points) overrides["n_points"] = *n_points;
  if (gen_task) overrides["task"] = *gen_task;
  if (fit_task) overrides["task"] = *fit_task;
  if (labeling) overrides["labeling"] = *labeling;
  if (n_classes) overrides["n_classes"] = *n_classes;
  if (steps) overrides["steps"] = *steps;
  if (budget) overrides["optimizer"]["budget"] = *budget;
  if (method) overrides["optimizer"]["method"] = *method;

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    const Run run = resolve(g, overrides, name);
    if (name == "gen-data") return cmd_gen_data(run);
    if (name == "evolve") return cmd_evolve(run);
    if (name == "fit") return cmd_fit(run, data_path);
    if (name == "predict") return cmd_predict(run, model_path, times_path, momentum_mode);
    if (name == "theta-inspect") return cmd_theta_inspect(run, coeffs, inspect_model, nodes, theta_tol);
    if (name == "loop-check") return cmd_loop_check(run, loop_tol);
    throw UsageError("unknown subcommand");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.status);
  } catch (const Json::exception& e) {
    std::cerr << "error: bad JSON value: " << e.what() << "\n";
    return kExitUsage;
  }
}
