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

#ifndef IONLEARN_SERIALIZE_HPP
#define IONLEARN_SERIALIZE_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ionlearn/datagen.hpp"
#include "ionlearn/dynamics.hpp"
#include "ionlearn/learning.hpp"
#include "ionlearn/metrics.hpp"
#include "ionlearn/optimize.hpp"
#include "ionlearn/wavepacket.hpp"

namespace ionlearn {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// {"kind": "harmonic", "terms": [[amp, freq], ...]} | {"kind": "constant", "value": v}
// | {"kind": "four_wave"}. Custom profiles cannot be serialized.
Json field_to_json(const ElasticField& field);
ElasticField field_from_json(const Json& j);

// {"coeffs": [a1, a3, ...]}, plus "omega" when the base frequency is not 1.
Json theta_to_json(const ThetaAnsatz& theta);
ThetaAnsatz theta_from_json(const Json& j);

Json provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const Json& j);

Json metrics_to_json(const MetricMap& m);
Json validity_to_json(const ThetaValidityReport& r);
Json trace_to_json(const OptimizationTrace& trace);

/// Everything needed to predict with a fitted model.
struct TrainedModel {
  Task task = Task::Regression;
  ThetaAnsatz theta;
  CanonicalPair q0{1.0, 1.0};
  double threshold = 0.5;
  std::optional<Calibration> calibration;
  std::optional<Covariance> covariance;

  static TrainedModel from_report(const FitReport& report);
};

Json model_to_json(const TrainedModel& m);
TrainedModel model_from_json(const Json& j);

/// Versioned report document; includes a "model" object usable by predict.
Json fit_report_to_json(const FitReport& report);

/// Predictions at the dataset's records: y_true is the target (regression,
/// density) or the class label (classification); y_pred is the model
/// position (or density); prob and label_pred are classification only.
/// With `momentum`, p_pred carries the conjugate prediction (not density).
std::vector<PredictionRow> predict_records(const TrainedModel& model, const std::vector<Record>& records,
                                           bool with_truth = true,
                                           std::optional<MomentumMode> momentum = std::nullopt);

/// Query points for prediction: any CSV whose header names a `t` column;
/// x_coord, target and label are picked up when present.
struct PointTable {
  std::vector<Record> records;
  bool has_target = false;
};
PointTable read_points_csv(std::istream& is);

/// t[,x_coord][,y_true],y_pred[,p_pred][,prob,label_pred]
void write_predictions_csv(const std::vector<PredictionRow>& rows, std::ostream& os);

/// t,u11,u12,u21,u22,det,gamma
void write_evolution_csv(const std::vector<EvolutionMatrix>& path, std::ostream& os);

/// t,x,p
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

/// fpr,tpr,threshold
void write_roc_csv(const std::vector<RocPoint>& roc, std::ostream& os);

/// data.csv plus its sidecar data.json (same stem).
std::string sidecar_path(const std::string& csv_path);
void save_dataset(const Dataset& ds, const std::string& csv_path);
/// Reads the CSV and, when present, its sidecar.
Dataset load_dataset(const std::string& csv_path);

/// Run-config readers. Every key is optional and falls back to the default
/// of the target struct; see README for the document layout.
OptimizerConfig optimizer_config_from_json(const Json& run_config);
FitOptions fit_options_from_json(const Json& run_config);
DatasetSpec dataset_spec_from_json(const Json& run_config);
struct DensityGrids {
  DensitySpec spec;
  std::vector<double> x_grid;
  TimeGrid t_grid;
};
DensityGrids density_spec_from_json(const Json& run_config);
Task task_from_json(const Json& run_config);
std::size_t n_params_from_json(const Json& run_config);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ionlearn

#endif  // IONLEARN_SERIALIZE_HPP
