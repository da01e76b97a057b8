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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "ionlearn/csv.hpp"
#include "ionlearn/error.hpp"
#include "ionlearn/serialize.hpp"

using namespace ionlearn;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ionlearn::Error");
  return ErrorCode::Io;
}

std::filesystem::path scratch_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / (std::string("ionlearn_test_") + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("csv number formatting") {
  for (double v : {0.0, -0.0, 0.1, 1e-300, 6.02214076e23, -1.0 / 7.0}) {
    CHECK(csv::parse_real(csv::format_real(v)) == v);
  }
  CHECK(csv::parse_integer("42") == 42);
  CHECK_THROWS_AS(csv::parse_real("abc"), Error);
  CHECK_THROWS_AS(csv::parse_real("1.5x"), Error);
  const auto cells = csv::split_line("a,b,,c\r");
  REQUIRE(cells.size() == 4);
  CHECK(cells[2].empty());
  CHECK(cells[3] == "c");
}

TEST_CASE("field and theta json") {
  for (const auto& f : {ElasticField::four_wave(), ElasticField::constant(0.7),
                        ElasticField::harmonic({{1.0, 0.0}, {0.25, 3.0}})}) {
    const auto back = field_from_json(Json::parse(field_to_json(f).dump()));
    for (double t : {-3.0, 0.0, 1.3}) CHECK(back(t) == f(t));
  }
  CHECK(field_to_json(ElasticField::four_wave())["kind"] == "harmonic");  // written as its terms
  CHECK(field_from_json(Json{{"kind", "four_wave"}})(0.3) == ElasticField::four_wave()(0.3));
  CHECK(code_of([] { field_to_json(ElasticField::custom([](double) { return 1.0; })); }) == ErrorCode::Config);
  CHECK(code_of([] { field_from_json(Json{{"kind", "bogus"}}); }) == ErrorCode::Config);
  CHECK(code_of([] { field_from_json(Json{{"kind", "harmonic"}, {"terms", Json::array()}}); }) == ErrorCode::Config);

  const ThetaAnsatz th({0.9, -0.1, 0.02});
  const auto j = theta_to_json(th);
  CHECK(!j.contains("omega"));
  CHECK(theta_from_json(j).coeffs() == th.coeffs());
  const auto scaled = theta_from_json(theta_to_json(ThetaAnsatz({2.0}, 0.5)));
  CHECK(scaled.base_frequency() == 0.5);
  CHECK(code_of([] { theta_from_json(Json{{"coeffs", Json::array()}}); }) == ErrorCode::Config);
  CHECK(code_of([] { theta_from_json(Json::object()); }) == ErrorCode::Config);
}

TEST_CASE("fit report and model documents") {
  DatasetSpec spec;
  spec.n_points = 80;
  spec.steps = 800;
  spec.labeling = Labeling::Median;
  const auto ds = generate_dataset(spec);
  OptimizerConfig cfg;
  cfg.budget = 20;
  FitOptions opts;
  opts.calibrate = true;
  const auto rep = fit_classifier(ds, cfg, 2, opts);
  const auto j = fit_report_to_json(rep);
  CHECK(j["schema"] == 1);
  for (const char* key : {"best_params", "iterations_run", "stop_reason", "seed", "train_metrics", "test_metrics",
                          "history", "theta_validity", "model"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["train_metrics"].contains("auc"));
  CHECK(j["train_metrics"].contains("confusion"));
  CHECK(j["train_metrics"]["roc"][0][2].is_null());  // the +inf threshold
  CHECK(j["history"].size() == rep.iterations_run);

  // The embedded model reproduces the classifier exactly after a text round-trip.
  const auto model = model_from_json(Json::parse(j.dump()));
  CHECK(model.task == Task::Classification);
  REQUIRE(model.calibration.has_value());
  const auto direct = classifier_model(rep);
  for (const auto& r : ds.records) {
    const auto rows = predict_records(model, {r});
    CHECK(rows[0].prob == class_probability(direct, r.t));
    CHECK(rows[0].label_pred == predict_label(direct, r.t));
    CHECK(rows[0].y_true == static_cast<double>(*r.label));
  }
  CHECK(code_of([] { model_from_json(Json{{"task", "regression"}}); }) == ErrorCode::Config);
  CHECK(code_of([] {
          model_from_json(Json{{"task", "density"}, {"theta", {{"coeffs", {1.0}}}}});
        }) == ErrorCode::Config);
}

TEST_CASE("predictions and query points") {
  const TrainedModel reg{Task::Regression, ThetaAnsatz({1.0}), {1.0, 0.5}};
  std::istringstream pts("label,t\n1,0.0\n0,1.5\n");
  const auto table = read_points_csv(pts);
  CHECK(!table.has_target);
  REQUIRE(table.records.size() == 2);
  CHECK(table.records[1].t == 1.5);
  CHECK(table.records[1].label == 0);

  const auto rows = predict_records(reg, table.records, false, MomentumMode::Derivative);
  CHECK(!rows[0].y_true);
  CHECK(rows[0].y_pred == doctest::Approx(1.0));
  CHECK(rows[1].p_pred == doctest::Approx(-std::sin(1.5) + 0.5 * std::cos(1.5)).epsilon(1e-14));
  std::ostringstream os;
  write_predictions_csv(rows, os);
  CHECK(os.str().rfind("t,y_pred,p_pred\n", 0) == 0);

  std::ostringstream with_truth;
  write_predictions_csv(predict_records(reg, {{0.2, {}, 3.0, {}, {}}}), with_truth);
  CHECK(with_truth.str().rfind("t,y_true,y_pred\n", 0) == 0);

  const TrainedModel dens{Task::Density, ThetaAnsatz({1.0}), {1.0, 1.0}, 0.5, std::nullopt, Covariance{0.5, 0.0, 0.5}};
  CHECK(code_of([&] { predict_records(dens, table.records); }) == ErrorCode::Domain);  // no x_coord
  CHECK(code_of([&] { predict_records(dens, {{0.0, 1.0, 0.0, {}, {}}}, true, MomentumMode::Derivative); }) ==
        ErrorCode::Domain);
  std::ostringstream dos;
  write_predictions_csv(predict_records(dens, {{0.0, 1.0, 0.2, {}, {}}}), dos);
  CHECK(dos.str().rfind("t,x_coord,y_true,y_pred\n", 0) == 0);

  std::istringstream no_t("x,y\n1,2\n");
  CHECK(code_of([&] { read_points_csv(no_t); }) == ErrorCode::Io);
  std::istringstream ragged("t,target\n1\n");
  CHECK(code_of([&] { read_points_csv(ragged); }) == ErrorCode::Io);
}

TEST_CASE("evolution, trajectory and roc csv headers") {
  std::ostringstream a, b, c;
  write_evolution_csv(integrate_cauchy(ElasticField::constant(1.0), 0.0, 1.0, 4), a);
  CHECK(a.str().rfind("t,u11,u12,u21,u22,det,gamma\n", 0) == 0);
  write_trajectory_csv(evolve_canonical(ElasticField::constant(1.0), {1, 0}, TimeGrid::uniform(0, 1, 3), {0, 1}, 10), b);
  CHECK(b.str().rfind("t,x,p\n", 0) == 0);
  write_roc_csv({{0, 0, std::numeric_limits<double>::infinity()}, {1, 1, 0.2}}, c);
  CHECK(c.str() == "fpr,tpr,threshold\n0,0,inf\n1,1,0.20000000000000001\n");
}

TEST_CASE("dataset files with sidecar") {
  const auto dir = scratch_dir("sidecar");
  DatasetSpec spec;
  spec.n_points = 50;
  spec.steps = 500;
  spec.seed = 12;
  spec.field = ElasticField::constant(1.0);
  const auto ds = generate_dataset(spec);
  const auto path = (dir / "data.csv").string();
  save_dataset(ds, path);
  CHECK(sidecar_path(path) == (dir / "data.json").string());
  CHECK(std::filesystem::exists(dir / "data.json"));
  const auto back = load_dataset(path);
  CHECK(back.provenance.seed == 12);
  REQUIRE(back.provenance.field.has_value());
  CHECK((*back.provenance.field)(2.0) == 1.0);
  for (std::size_t i = 0; i < ds.size(); ++i) CHECK(back.records[i].target == ds.records[i].target);
  CHECK(read_json_file((dir / "data.json").string())["schema"] == 1);
  CHECK(code_of([&] { load_dataset((dir / "missing.csv").string()); }) == ErrorCode::Io);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run config readers") {
  const Json empty = Json::object();
  const auto opt = optimizer_config_from_json(empty);
  CHECK(opt.budget == 150);
  CHECK(opt.init_points == 10);
  CHECK(opt.patience == 15);
  CHECK(opt.min_improvement == 1e-4);
  CHECK(opt.method == Method::Bayes);
  const auto spec = dataset_spec_from_json(empty);
  CHECK(spec.n_points == 500);
  CHECK(spec.noise_fraction == 0.1);
  CHECK(spec.interval.t_min == -2 * pi);
  CHECK(spec.labeling == Labeling::None);
  CHECK(spec.train_ratio == 0.8);
  CHECK(spec.strategy == SplitStrategy::Stratified);
  CHECK(task_from_json(empty) == Task::Regression);
  CHECK(n_params_from_json(empty) == 3);
  CHECK(dataset_spec_from_json(Json{{"task", "classification"}}).labeling == Labeling::Median);

  const Json cfg = Json::parse(R"({
    "seed": 9, "interval": [-3.14159, 3.14159], "n_points": 40, "q0": [0.5, -1],
    "field": {"kind": "constant", "value": 2.0}, "noise_fraction": 0.3,
    "optimizer": {"budget": 30, "method": "random"},
    "split": {"ratio": 0.75, "strategy": "shuffled"},
    "fit": {"coeff_box": [-1, 3], "calibrate": true},
    "density": {"x_grid": [-2, 2, 9], "t_points": 7, "cov": [1.0, 0.2, 0.5]}
  })");
  const auto o = optimizer_config_from_json(cfg);
  CHECK(o.seed == 9);
  CHECK(o.budget == 30);
  CHECK(o.method == Method::Random);
  const auto s = dataset_spec_from_json(cfg);
  CHECK(s.n_points == 40);
  CHECK(s.q0.p == -1.0);
  CHECK(s.field(0.0) == 2.0);
  CHECK(s.train_ratio == 0.75);
  CHECK(s.strategy == SplitStrategy::Shuffled);
  const auto f = fit_options_from_json(cfg);
  CHECK(f.coeff_lower == -1.0);
  CHECK(f.calibrate);
  const auto d = density_spec_from_json(cfg);
  CHECK(d.x_grid.size() == 9);
  CHECK(d.t_grid.size() == 7);
  CHECK(d.spec.state0.cov[1] == 0.2);
  CHECK(d.spec.state0.mean.x == 0.5);

  CHECK(code_of([] { optimizer_config_from_json(Json{{"optimizer", {{"method", "grid"}}}}); }) == ErrorCode::Config);
  CHECK(code_of([] { optimizer_config_from_json(Json{{"optimizer", {{"budget", 3}}}}); }) == ErrorCode::Config);
  CHECK(code_of([] { optimizer_config_from_json(Json{{"optimizer", {{"budget", "many"}}}}); }) == ErrorCode::Config);
  CHECK(code_of([] { dataset_spec_from_json(Json{{"interval", {1, 0}}}); }) == ErrorCode::Config);
  CHECK(code_of([] { dataset_spec_from_json(Json{{"labeling", "kmeans"}}); }) == ErrorCode::Config);
  CHECK(code_of([] { dataset_spec_from_json(Json{{"split", {{"ratio", 1.2}}}}); }) == ErrorCode::Config);
  CHECK(code_of([] { task_from_json(Json{{"task", "ranking"}}); }) == ErrorCode::Config);
  CHECK(code_of([] { n_params_from_json(Json{{"n_params", 0}}); }) == ErrorCode::Config);
  CHECK(code_of([] { density_spec_from_json(Json{{"density", {{"cov", {0.1, 0.0, 0.1}}}}}); }) == ErrorCode::Config);
}
