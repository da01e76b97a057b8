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

#include "ionlearn/ionlearn.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ionlearn/datagen.hpp"
#include "ionlearn/dynamics.hpp"
#include "ionlearn/error.hpp"
#include "ionlearn/learning.hpp"
#include "ionlearn/optimize.hpp"
#include "ionlearn/serialize.hpp"
#include "ionlearn/wavepacket.hpp"

struct ionl_field {
  ionlearn::ElasticField field;
};

struct ionl_theta {
  ionlearn::ThetaAnsatz theta;
};

struct ionl_dataset {
  ionlearn::Dataset dataset;
  ionlearn::Warnings warnings;
};

struct ionl_fit {
  ionlearn::FitReport report;
};

struct ionl_model {
  ionlearn::TrainedModel model;
};

namespace {

using ionlearn::ErrorCode;
using ionlearn::Json;

thread_local std::string g_last_error;

ionl_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return IONL_ERR_DOMAIN;
    case ErrorCode::Integration: return IONL_ERR_INTEGRATION;
    case ErrorCode::Singularity: return IONL_ERR_SINGULARITY;
    case ErrorCode::Range: return IONL_ERR_RANGE;
    case ErrorCode::Io: return IONL_ERR_IO;
    case ErrorCode::Config: return IONL_ERR_CONFIG;
  }
  return IONL_ERR_INTERNAL;
}

struct InvalidArgument {
  const char* what;
};

template <typename Fn>
ionl_status guarded(Fn&& fn) noexcept {
  g_last_error.clear();
  try {
    fn();
    return IONL_OK;
  } catch (const InvalidArgument& e) {
    g_last_error = e.what;
    return IONL_ERR_INVALID_ARGUMENT;
  } catch (const ionlearn::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const Json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return IONL_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return IONL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IONL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return IONL_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw InvalidArgument{what};
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Json parse_json(const char* text) {
  require(text, "json text is null");
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ionlearn::Error(ErrorCode::Config, std::string("invalid JSON: ") + e.what());
  }
}

ionl_matrix to_c(const ionlearn::EvolutionMatrix& u) { return {u.u11, u.u12, u.u21, u.u22, u.t, u.t0}; }

ionlearn::EvolutionMatrix from_c(const ionl_matrix& m) { return {m.u11, m.u12, m.u21, m.u22, m.t, m.t0}; }

ionlearn::MomentumMode momentum_of(ionl_momentum_mode mode) {
  switch (mode) {
    case IONL_MOMENTUM_MATRIX_HALVED: return ionlearn::MomentumMode::MatrixHalved;
    case IONL_MOMENTUM_MATRIX_DET1: return ionlearn::MomentumMode::MatrixDet1;
    case IONL_MOMENTUM_DERIVATIVE: return ionlearn::MomentumMode::Derivative;
    case IONL_MOMENTUM_NONE: break;
  }
  throw InvalidArgument{"unknown momentum mode"};
}

ionlearn::ThetaAnsatz theta_document(const Json& j) {
  if (j.contains("coeffs")) return ionlearn::theta_from_json(j);
  if (j.contains("theta")) return ionlearn::theta_from_json(j["theta"]);
  if (j.contains("model")) return ionlearn::model_from_json(j).theta;
  throw ionlearn::Error(ErrorCode::Config, "no theta found (expected 'coeffs', 'theta' or 'model')");
}

}  // namespace

extern "C" {

const char* ionl_version(void) { return "0.1.0"; }

const char* ionl_status_name(ionl_status status) {
  switch (status) {
    case IONL_OK: return "ok";
    case IONL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case IONL_ERR_DOMAIN: return "domain";
    case IONL_ERR_INTEGRATION: return "integration";
    case IONL_ERR_SINGULARITY: return "singularity";
    case IONL_ERR_RANGE: return "range";
    case IONL_ERR_IO: return "io";
    case IONL_ERR_CONFIG: return "config";
    case IONL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* ionl_last_error(void) { return g_last_error.c_str(); }

void ionl_string_free(char* s) { std::free(s); }

// ---------------------------------------------------------------- fields

ionl_status ionl_field_from_json(const char* json, ionl_field** out) {
  return guarded([&] {
    require(out, "out is null");
    const Json j = parse_json(json);
    const Json& f = j.contains("field") ? j["field"] : j;
    *out = new ionl_field{ionlearn::field_from_json(f)};
  });
}

ionl_status ionl_field_constant(double beta, ionl_field** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new ionl_field{ionlearn::ElasticField::constant(beta)};
  });
}

ionl_status ionl_field_four_wave(ionl_field** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new ionl_field{ionlearn::ElasticField::four_wave()};
  });
}

ionl_status ionl_field_harmonic(const double* amplitudes, const double* frequencies, size_t n, ionl_field** out) {
  return guarded([&] {
    require(out, "out is null");
    if (n > 0) {
      require(amplitudes, "amplitudes is null");
      require(frequencies, "frequencies is null");
    }
    std::vector<ionlearn::HarmonicTerm> terms;
    for (size_t i = 0; i < n; ++i) terms.push_back({amplitudes[i], frequencies[i]});
    *out = new ionl_field{ionlearn::ElasticField::harmonic(std::move(terms))};
  });
}

ionl_status ionl_field_eval(const ionl_field* field, double t, double* out) {
  return guarded([&] {
    require(field, "field is null");
    require(out, "out is null");
    *out = field->field(t);
  });
}

ionl_status ionl_field_to_json(const ionl_field* field, char** out) {
  return guarded([&] {
    require(field, "field is null");
    require(out, "out is null");
    *out = dup_string(ionlearn::field_to_json(field->field).dump());
  });
}

void ionl_field_free(ionl_field* field) { delete field; }

// ---------------------------------------------------------------- theta

ionl_status ionl_theta_create(const double* coeffs, size_t n, ionl_theta** out) {
  return guarded([&] {
    require(out, "out is null");
    if (n > 0) require(coeffs, "coeffs is null");
    *out = new ionl_theta{ionlearn::ThetaAnsatz(std::vector<double>(coeffs, coeffs + n))};
  });
}

ionl_status ionl_theta_from_json(const char* json, ionl_theta** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new ionl_theta{theta_document(parse_json(json))};
  });
}

ionl_status ionl_theta_to_json(const ionl_theta* theta, char** out) {
  return guarded([&] {
    require(theta, "theta is null");
    require(out, "out is null");
    *out = dup_string(ionlearn::theta_to_json(theta->theta).dump());
  });
}

ionl_status ionl_theta_derivative(const ionl_theta* theta, double t, int order, double* out) {
  return guarded([&] {
    require(theta, "theta is null");
    require(out, "out is null");
    if (order < 0 || order > 3) throw InvalidArgument{"derivative order must lie in 0..3"};
    *out = theta->theta.derivative(t, order);
  });
}

ionl_status ionl_theta_validate(const ionl_theta* theta, double t_min, double t_max, size_t nodes, double tol,
                                char** report_json) {
  return guarded([&] {
    require(theta, "theta is null");
    require(report_json, "out is null");
    const auto grid = ionlearn::TimeGrid::uniform(t_min, t_max, nodes);
    const auto report = ionlearn::validate_theta(theta->theta, grid, tol);
    *report_json = dup_string(ionlearn::validity_to_json(report).dump());
  });
}

ionl_status ionl_beta_from_theta(const ionl_theta* theta, double t, double* out) {
  return guarded([&] {
    require(theta, "theta is null");
    require(out, "out is null");
    *out = ionlearn::beta_from_theta(theta->theta, t);
  });
}

ionl_status ionl_closed_form(const ionl_theta* theta, double t, ionl_convention convention, ionl_matrix* out) {
  return guarded([&] {
    require(theta, "theta is null");
    require(out, "out is null");
    ionlearn::Convention c;
    if (convention == IONL_CONVENTION_HALVED) c = ionlearn::Convention::Halved;
    else if (convention == IONL_CONVENTION_DET1) c = ionlearn::Convention::Det1;
    else throw InvalidArgument{"unknown convention"};
    *out = to_c(ionlearn::closed_form_u(theta->theta, t, c));
  });
}

ionl_status ionl_oscillator_residual(const ionl_theta* theta, const ionl_field* field, const double* grid, size_t n,
                                     double* out) {
  return guarded([&] {
    require(theta, "theta is null");
    require(field, "field is null");
    require(grid, "grid is null");
    require(out, "out is null");
    const ionlearn::TimeGrid g(std::vector<double>(grid, grid + n));
    *out = ionlearn::oscillator_residual(theta->theta, field->field, g);
  });
}

void ionl_theta_free(ionl_theta* theta) { delete theta; }

// ---------------------------------------------------------------- evolution

ionl_status ionl_integrate(const ionl_field* field, double t0, double t1, size_t steps, ionl_matrix* path) {
  return guarded([&] {
    require(field, "field is null");
    require(path, "path is null");
    const auto us = ionlearn::integrate_cauchy(field->field, t0, t1, steps);
    for (size_t i = 0; i < us.size(); ++i) path[i] = to_c(us[i]);
  });
}

ionl_status ionl_classify_stability(const ionl_matrix* u, double tol, ionl_stability* out) {
  return guarded([&] {
    require(u, "u is null");
    require(out, "out is null");
    const auto s = ionlearn::classify_stability(from_c(*u), tol);
    out->tag = s.tag == ionlearn::Stability::Focusing ? IONL_FOCUSING
               : s.tag == ionlearn::Stability::Edge   ? IONL_EDGE
                                                      : IONL_DEFOCUSING;
    out->gamma = s.gamma;
    for (int k = 0; k < 2; ++k) {
      out->kappa_re[k] = s.kappa[k].real();
      out->kappa_im[k] = s.kappa[k].imag();
    }
  });
}

ionl_status ionl_loop_distance(const ionl_matrix* u, double* to_identity, double* to_minus_identity) {
  return guarded([&] {
    require(u, "u is null");
    require(to_identity, "to_identity is null");
    require(to_minus_identity, "to_minus_identity is null");
    const auto d = ionlearn::loop_distance(from_c(*u));
    *to_identity = d.to_identity;
    *to_minus_identity = d.to_minus_identity;
  });
}

ionl_status ionl_evolution_csv(const ionl_field* field, double t0, double t1, size_t steps, char** csv) {
  return guarded([&] {
    require(field, "field is null");
    require(csv, "out is null");
    std::ostringstream os;
    ionlearn::write_evolution_csv(ionlearn::integrate_cauchy(field->field, t0, t1, steps), os);
    *csv = dup_string(os.str());
  });
}

ionl_status ionl_trajectory_csv(const ionl_field* field, double x0, double p0, double t0, double t1,
                                size_t n_points, size_t steps, char** csv) {
  return guarded([&] {
    require(field, "field is null");
    require(csv, "out is null");
    const auto grid = ionlearn::TimeGrid::uniform(t0, t1, n_points);
    const auto traj = ionlearn::evolve_canonical(field->field, {x0, p0}, grid, {t0, t1}, steps);
    std::ostringstream os;
    ionlearn::write_trajectory_csv(traj, os);
    *csv = dup_string(os.str());
  });
}

// ---------------------------------------------------------------- datasets

ionl_status ionl_dataset_generate(const char* config_json, ionl_dataset** out) {
  return guarded([&] {
    require(out, "out is null");
    const auto spec = ionlearn::dataset_spec_from_json(parse_json(config_json));
    auto* ds = new ionl_dataset{};
    try {
      ds->dataset = ionlearn::generate_dataset(spec, &ds->warnings);
    } catch (...) {
      delete ds;
      throw;
    }
    *out = ds;
  });
}

ionl_status ionl_dataset_generate_density(const char* config_json, ionl_dataset** out) {
  return guarded([&] {
    require(out, "out is null");
    const auto grids = ionlearn::density_spec_from_json(parse_json(config_json));
    auto* ds = new ionl_dataset{};
    try {
      ds->dataset = ionlearn::make_density_dataset(grids.spec, grids.x_grid, grids.t_grid, &ds->warnings);
    } catch (...) {
      delete ds;
      throw;
    }
    *out = ds;
  });
}

ionl_status ionl_dataset_load(const char* csv_path, ionl_dataset** out) {
  return guarded([&] {
    require(csv_path, "path is null");
    require(out, "out is null");
    *out = new ionl_dataset{ionlearn::load_dataset(csv_path), {}};
  });
}

ionl_status ionl_dataset_save(const ionl_dataset* dataset, const char* csv_path) {
  return guarded([&] {
    require(dataset, "dataset is null");
    require(csv_path, "path is null");
    ionlearn::save_dataset(dataset->dataset, csv_path);
  });
}

ionl_status ionl_dataset_size(const ionl_dataset* dataset, size_t* out) {
  return guarded([&] {
    require(dataset, "dataset is null");
    require(out, "out is null");
    *out = dataset->dataset.size();
  });
}

ionl_status ionl_dataset_csv(const ionl_dataset* dataset, char** out) {
  return guarded([&] {
    require(dataset, "dataset is null");
    require(out, "out is null");
    std::ostringstream os;
    ionlearn::write_dataset_csv(dataset->dataset, os);
    *out = dup_string(os.str());
  });
}

ionl_status ionl_dataset_provenance_json(const ionl_dataset* dataset, char** out) {
  return guarded([&] {
    require(dataset, "dataset is null");
    require(out, "out is null");
    *out = dup_string(ionlearn::provenance_to_json(dataset->dataset.provenance).dump(2));
  });
}

ionl_status ionl_dataset_warnings(const ionl_dataset* dataset, char** out) {
  return guarded([&] {
    require(dataset, "dataset is null");
    require(out, "out is null");
    *out = dup_string(Json(dataset->warnings).dump());
  });
}

void ionl_dataset_free(ionl_dataset* dataset) { delete dataset; }

// ---------------------------------------------------------------- fitting

ionl_status ionl_fit_run(const ionl_dataset* dataset, const char* config_json, ionl_fit** out) {
  return guarded([&] {
    require(dataset, "dataset is null");
    require(out, "out is null");
    const Json config = parse_json(config_json);
    const auto task = ionlearn::task_from_json(config);
    const auto optimizer = ionlearn::optimizer_config_from_json(config);
    const auto options = ionlearn::fit_options_from_json(config);
    const auto n_params = ionlearn::n_params_from_json(config);
    const auto& ds = dataset->dataset;
    ionlearn::FitReport report;
    switch (task) {
      case ionlearn::Task::Regression:
        report = ionlearn::fit_regression(ds, optimizer, n_params, options);
        break;
      case ionlearn::Task::Classification:
        report = ionlearn::fit_classifier(ds, optimizer, n_params, options);
        break;
      case ionlearn::Task::Density:
        report = ionlearn::fit_density_regression(ds, optimizer, n_params, options);
        break;
    }
    *out = new ionl_fit{std::move(report)};
  });
}

ionl_status ionl_fit_report_json(const ionl_fit* fit, char** out) {
  return guarded([&] {
    require(fit, "fit is null");
    require(out, "out is null");
    *out = dup_string(ionlearn::fit_report_to_json(fit->report).dump(2));
  });
}

ionl_status ionl_fit_predictions_csv(const ionl_fit* fit, const ionl_dataset* dataset, char** out) {
  return guarded([&] {
    require(fit, "fit is null");
    require(dataset, "dataset is null");
    require(out, "out is null");
    const auto model = ionlearn::TrainedModel::from_report(fit->report);
    std::ostringstream os;
    ionlearn::write_predictions_csv(ionlearn::predict_records(model, dataset->dataset.records), os);
    *out = dup_string(os.str());
  });
}

ionl_status ionl_fit_roc_csv(const ionl_fit* fit, char** out) {
  return guarded([&] {
    require(fit, "fit is null");
    require(out, "out is null");
    const auto& roc = fit->report.test_metrics.roc;
    if (!roc) throw ionlearn::Error(ErrorCode::Domain, "fit has no test ROC curve");
    std::ostringstream os;
    ionlearn::write_roc_csv(*roc, os);
    *out = dup_string(os.str());
  });
}

ionl_status ionl_fit_model(const ionl_fit* fit, ionl_model** out) {
  return guarded([&] {
    require(fit, "fit is null");
    require(out, "out is null");
    *out = new ionl_model{ionlearn::TrainedModel::from_report(fit->report)};
  });
}

void ionl_fit_free(ionl_fit* fit) { delete fit; }

// ---------------------------------------------------------------- models

ionl_status ionl_model_from_json(const char* json, ionl_model** out) {
  return guarded([&] {
    require(out, "out is null");
    *out = new ionl_model{ionlearn::model_from_json(parse_json(json))};
  });
}

ionl_status ionl_model_to_json(const ionl_model* model, char** out) {
  return guarded([&] {
    require(model, "model is null");
    require(out, "out is null");
    *out = dup_string(ionlearn::model_to_json(model->model).dump(2));
  });
}

ionl_status ionl_model_predict(const ionl_model* model, double t, ionl_momentum_mode mode, double* position,
                               double* momentum) {
  return guarded([&] {
    require(model, "model is null");
    require(position, "position is null");
    if (model->model.task == ionlearn::Task::Density) {
      throw ionlearn::Error(ErrorCode::Domain, "density models predict on (t, x); use ionl_model_predict_csv");
    }
    const ionlearn::RegressionModel r{model->model.theta, model->model.q0,
                                      mode == IONL_MOMENTUM_NONE ? ionlearn::MomentumMode::Derivative
                                                                 : momentum_of(mode)};
    *position = ionlearn::predict_position(r, t);
    if (momentum != nullptr) *momentum = mode == IONL_MOMENTUM_NONE ? std::nan("") : ionlearn::predict_momentum(r, t);
  });
}

ionl_status ionl_model_predict_csv(const ionl_model* model, const char* points_csv, ionl_momentum_mode mode,
                                   char** out) {
  return guarded([&] {
    require(model, "model is null");
    require(points_csv, "points_csv is null");
    require(out, "out is null");
    std::istringstream is{std::string(points_csv)};
    const auto table = ionlearn::read_points_csv(is);
    std::optional<ionlearn::MomentumMode> m;
    if (mode != IONL_MOMENTUM_NONE) m = momentum_of(mode);
    const bool truth = table.has_target || std::any_of(table.records.begin(), table.records.end(),
                                                       [](const auto& r) { return r.label.has_value(); });
    std::ostringstream os;
    ionlearn::write_predictions_csv(ionlearn::predict_records(model->model, table.records, truth, m), os);
    *out = dup_string(os.str());
  });
}

ionl_status ionl_model_theta(const ionl_model* model, ionl_theta** out) {
  return guarded([&] {
    require(model, "model is null");
    require(out, "out is null");
    *out = new ionl_theta{model->model.theta};
  });
}

void ionl_model_free(ionl_model* model) { delete model; }

// ---------------------------------------------------------------- optimizer

ionl_status ionl_minimize(ionl_objective_fn fn, void* user, const double* lower, const double* upper, size_t dim,
                          const char* config_json, char** trace_json) {
  return guarded([&] {
    if (fn == nullptr) throw InvalidArgument{"objective is null"};
    require(lower, "lower is null");
    require(upper, "upper is null");
    require(trace_json, "out is null");
    ionlearn::ParameterSpace space{std::vector<double>(lower, lower + dim), std::vector<double>(upper, upper + dim)};
    const auto config = ionlearn::optimizer_config_from_json(parse_json(config_json));
    const auto trace = ionlearn::minimize(
        [&](std::span<const double> x) { return fn(x.data(), x.size(), user); }, space, config);
    *trace_json = dup_string(ionlearn::trace_to_json(trace).dump(2));
  });
}

}  // extern "C"
