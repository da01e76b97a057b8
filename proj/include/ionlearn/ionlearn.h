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

/*
 * C interface to the ionlearn library.
 *
 * Every function returns an ionl_status. On failure a message is available
 * from ionl_last_error() on the calling thread until the next call. Strings
 * returned through char** are owned by the caller and released with
 * ionl_string_free; handles are released with their *_free function.
 */
#ifndef IONLEARN_IONLEARN_H
#define IONLEARN_IONLEARN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(IONL_BUILDING_LIBRARY)
#    define IONL_API __declspec(dllexport)
#  else
#    define IONL_API __declspec(dllimport)
#  endif
#else
#  define IONL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ionl_status {
  IONL_OK = 0,
  IONL_ERR_INVALID_ARGUMENT = 1,
  IONL_ERR_DOMAIN = 2,
  IONL_ERR_INTEGRATION = 3,
  IONL_ERR_SINGULARITY = 4,
  IONL_ERR_RANGE = 5,
  IONL_ERR_IO = 6,
  IONL_ERR_CONFIG = 7,
  IONL_ERR_INTERNAL = 8
} ionl_status;

typedef enum ionl_stability_tag {
  IONL_FOCUSING = 0,
  IONL_EDGE = 1,
  IONL_DEFOCUSING = 2
} ionl_stability_tag;

typedef enum ionl_convention {
  IONL_CONVENTION_HALVED = 0,
  IONL_CONVENTION_DET1 = 1
} ionl_convention;

typedef enum ionl_momentum_mode {
  IONL_MOMENTUM_NONE = -1,
  IONL_MOMENTUM_MATRIX_HALVED = 0,
  IONL_MOMENTUM_MATRIX_DET1 = 1,
  IONL_MOMENTUM_DERIVATIVE = 2
} ionl_momentum_mode;

/* u(t, t0) = [[u11, u12], [u21, u22]]; t0 is NaN for closed-form matrices. */
typedef struct ionl_matrix {
  double u11, u12, u21, u22;
  double t, t0;
} ionl_matrix;

typedef struct ionl_stability {
  int tag; /* ionl_stability_tag */
  double gamma;
  double kappa_re[2];
  double kappa_im[2];
} ionl_stability;

typedef struct ionl_field ionl_field;
typedef struct ionl_theta ionl_theta;
typedef struct ionl_dataset ionl_dataset;
typedef struct ionl_fit ionl_fit;
typedef struct ionl_model ionl_model;

IONL_API const char* ionl_version(void);
IONL_API const char* ionl_status_name(ionl_status status);
IONL_API const char* ionl_last_error(void);
IONL_API void ionl_string_free(char* s);

/* Elastic fields. JSON is a field object or a run config holding "field". */
IONL_API ionl_status ionl_field_from_json(const char* json, ionl_field** out);
IONL_API ionl_status ionl_field_constant(double beta, ionl_field** out);
IONL_API ionl_status ionl_field_four_wave(ionl_field** out);
IONL_API ionl_status ionl_field_harmonic(const double* amplitudes, const double* frequencies, size_t n,
                                         ionl_field** out);
IONL_API ionl_status ionl_field_eval(const ionl_field* field, double t, double* out);
IONL_API ionl_status ionl_field_to_json(const ionl_field* field, char** out);
IONL_API void ionl_field_free(ionl_field* field);

/* Theta ansatz sum a_{2j-1} sin((2j-1) t). JSON is {"coeffs": [...]}, a run
 * config holding "theta", or a model / fit report. */
IONL_API ionl_status ionl_theta_create(const double* coeffs, size_t n, ionl_theta** out);
IONL_API ionl_status ionl_theta_from_json(const char* json, ionl_theta** out);
IONL_API ionl_status ionl_theta_to_json(const ionl_theta* theta, char** out);
IONL_API ionl_status ionl_theta_derivative(const ionl_theta* theta, double t, int order, double* out);
IONL_API ionl_status ionl_theta_validate(const ionl_theta* theta, double t_min, double t_max, size_t nodes,
                                         double tol, char** report_json);
IONL_API ionl_status ionl_beta_from_theta(const ionl_theta* theta, double t, double* out);
IONL_API ionl_status ionl_closed_form(const ionl_theta* theta, double t, ionl_convention convention,
                                      ionl_matrix* out);
IONL_API ionl_status ionl_oscillator_residual(const ionl_theta* theta, const ionl_field* field,
                                              const double* grid, size_t n, double* out);
IONL_API void ionl_theta_free(ionl_theta* theta);

/* Evolution. `path` receives steps + 1 matrices. */
IONL_API ionl_status ionl_integrate(const ionl_field* field, double t0, double t1, size_t steps,
                                    ionl_matrix* path);
IONL_API ionl_status ionl_classify_stability(const ionl_matrix* u, double tol, ionl_stability* out);
IONL_API ionl_status ionl_loop_distance(const ionl_matrix* u, double* to_identity, double* to_minus_identity);
/* t,u11,u12,u21,u22,det,gamma at every step. */
IONL_API ionl_status ionl_evolution_csv(const ionl_field* field, double t0, double t1, size_t steps, char** csv);
/* t,x,p on a uniform grid of n_points over [t0, t1]. */
IONL_API ionl_status ionl_trajectory_csv(const ionl_field* field, double x0, double p0, double t0, double t1,
                                         size_t n_points, size_t steps, char** csv);

/* Datasets. Generators take a run-config JSON document. */
IONL_API ionl_status ionl_dataset_generate(const char* config_json, ionl_dataset** out);
IONL_API ionl_status ionl_dataset_generate_density(const char* config_json, ionl_dataset** out);
IONL_API ionl_status ionl_dataset_load(const char* csv_path, ionl_dataset** out);
IONL_API ionl_status ionl_dataset_save(const ionl_dataset* dataset, const char* csv_path);
IONL_API ionl_status ionl_dataset_size(const ionl_dataset* dataset, size_t* out);
IONL_API ionl_status ionl_dataset_csv(const ionl_dataset* dataset, char** out);
IONL_API ionl_status ionl_dataset_provenance_json(const ionl_dataset* dataset, char** out);
/* JSON array of warning strings raised while building the dataset. */
IONL_API ionl_status ionl_dataset_warnings(const ionl_dataset* dataset, char** out);
IONL_API void ionl_dataset_free(ionl_dataset* dataset);

/* Fitting. The task, optimizer and fit options come from the run config. */
IONL_API ionl_status ionl_fit_run(const ionl_dataset* dataset, const char* config_json, ionl_fit** out);
IONL_API ionl_status ionl_fit_report_json(const ionl_fit* fit, char** out);
/* Predictions at every record of `dataset`. */
IONL_API ionl_status ionl_fit_predictions_csv(const ionl_fit* fit, const ionl_dataset* dataset, char** out);
/* fpr,tpr,threshold on the test split; classification only. */
IONL_API ionl_status ionl_fit_roc_csv(const ionl_fit* fit, char** out);
IONL_API ionl_status ionl_fit_model(const ionl_fit* fit, ionl_model** out);
IONL_API void ionl_fit_free(ionl_fit* fit);

/* Trained models. JSON is a model object or a fit report. */
IONL_API ionl_status ionl_model_from_json(const char* json, ionl_model** out);
IONL_API ionl_status ionl_model_to_json(const ionl_model* model, char** out);
IONL_API ionl_status ionl_model_predict(const ionl_model* model, double t, ionl_momentum_mode mode,
                                        double* position, double* momentum);
/* Predictions for a CSV of query points (header must name "t"). */
IONL_API ionl_status ionl_model_predict_csv(const ionl_model* model, const char* points_csv,
                                            ionl_momentum_mode mode, char** out);
IONL_API ionl_status ionl_model_theta(const ionl_model* model, ionl_theta** out);
IONL_API void ionl_model_free(ionl_model* model);

/* Box-constrained minimization; the trace is returned as JSON. */
typedef double (*ionl_objective_fn)(const double* x, size_t dim, void* user);
IONL_API ionl_status ionl_minimize(ionl_objective_fn fn, void* user, const double* lower, const double* upper,
                                   size_t dim, const char* config_json, char** trace_json);

#ifdef __cplusplus
}
#endif

#endif /* IONLEARN_IONLEARN_H */
