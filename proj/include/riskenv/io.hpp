// Copyright 2026 The riskenv Authors
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

#ifndef RISKENV_IO_HPP_
#define RISKENV_IO_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "riskenv/closed_loop.hpp"
#include "riskenv/dataset.hpp"
#include "riskenv/motion_vocab.hpp"
#include "riskenv/realism.hpp"
#include "riskenv/synthetic.hpp"
#include "riskenv/toy_predictor.hpp"

namespace riskenv::io
{

namespace fs = std::filesystem;

/// printf-style "%.9g".
std::string fmt9(double v);
/// Value rounded to 9 significant digits.
double round9(double v);

std::string read_text(const fs::path & p);
/// Writes the file, creating parent directories.
void write_text(const fs::path & p, const std::string & text);

// ---- trajectory CSV: frame,track_id,x,y,heading,length,width

std::string recording_to_csv(const Recording & rec);
/// Columns may come in any order; extra columns are ignored. Tracks must be
/// contiguous in frames.
Recording recording_from_csv(const std::string & text, double dt);
void write_recording(const fs::path & p, const Recording & rec);
Recording read_recording(const fs::path & p, double dt);

/// Every *.csv of a directory, sorted by file name.
std::vector<fs::path> list_recordings(const fs::path & dir);

// ---- key=value configuration

/// Line-based `key = value` text; '#' starts a comment. Keys are consumed by
/// the typed getters and finish() rejects any key nobody asked for.
class KeyValues
{
public:
  static KeyValues parse(const std::string & text, const std::string & origin = "config");
  static KeyValues load(const fs::path & p);

  bool has(const std::string & key) const { return values_.count(key) != 0; }
  double get(const std::string & key, double fallback);
  int get(const std::string & key, int fallback);
  std::uint64_t get(const std::string & key, std::uint64_t fallback);
  std::string get(const std::string & key, const std::string & fallback);
  std::vector<double> get(const std::string & key, const std::vector<double> & fallback);
  void finish() const;

private:
  std::optional<std::string> take(const std::string & key);

  std::string origin_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

struct SyntheticDatasetConfig
{
  SyntheticWorldParams world;
  std::vector<double> thresholds = kDatasetThresholds;
};

SyntheticDatasetConfig read_synthetic_config(KeyValues & kv);
std::string synthetic_config_text(const SyntheticDatasetConfig & cfg);

/// Scene of a data directory: its world.cfg when present, otherwise the
/// default synthetic world.
SceneConfig scene_for_data_dir(const fs::path & dir);

struct TrainSettings
{
  ToyPredictorConfig model;
  TrainingConfig training;
  std::string schedule_kind = "cosine";
  // Metric lengths; converted to model units once the normalizer is known.
  double offset_unit_m = 10.0;
  double context_radius_m = 15.0;
};

/// Sets the predictor's offset scale and context radius from metric lengths.
void apply_metric_scales(const TrainSettings & s, const Normalizer & norm, ToyPredictorConfig & cfg);

TrainSettings read_train_config(KeyValues & kv);

struct SimulateSettings
{
  std::string data_dir;  // scene and initialization clips
  std::vector<std::string> clips;  // file names in data_dir; empty = all
  SamplerConfig sampler;
  ExperimentConfig experiment;
  bool write_logs = true;
};

SimulateSettings read_simulate_config(KeyValues & kv);

// ---- vocabulary JSON

std::string vocabulary_to_json(const Vocabulary & v);
Vocabulary vocabulary_from_json(const std::string & text);
void write_vocabulary(const fs::path & p, const Vocabulary & v);
Vocabulary read_vocabulary(const fs::path & p);

// ---- model JSON

std::string model_to_json(const DiffusionModel & m);
DiffusionModel model_from_json(const std::string & text);
void write_model(const fs::path & p, const DiffusionModel & m);
DiffusionModel read_model(const fs::path & p);

// ---- labeled windows JSON

struct LabelFile
{
  std::string data_dir;
  RiskParams params;
  int horizon = 8;
  int max_agents = 12;
  std::vector<std::string> recordings;  // file names relative to data_dir
  std::vector<WindowLabel> windows;     // window tensors left empty
};

std::string labels_to_json(const LabelFile & f);
LabelFile labels_from_json(const std::string & text);

/// Labels plus the recordings they reference, windows filled in.
std::vector<WindowLabel> load_labeled_windows(const fs::path & label_file);

// ---- episode logs, histograms and reports

std::string episode_events_json(const EpisodeLog & log);
void write_episode(const fs::path & dir, const std::string & stem, const EpisodeLog & log);
/// Rebuilds the parts of a log that realism evaluation needs.
EpisodeLog read_episode(const fs::path & csv, const fs::path & sidecar, double dt);

std::string histogram_csv(const Histogram & h);
std::string histograms_json(const MetricHistograms & m);
MetricHistograms histograms_from_json(const std::string & text);

std::string experiment_report_json(
  const ExperimentReport & r, const ExperimentConfig & cfg,
  const std::optional<MetricHistograms> & reference);

std::string realism_report_json(const RealismReport & r, const std::vector<std::uint64_t> & seeds);

/// Report JSON plus one CSV per histogram, named `<prefix><metric>.csv`.
void write_histogram_csvs(
  const fs::path & dir, const std::string & prefix, const MetricHistograms & m);

}  // namespace riskenv::io

#endif  // RISKENV_IO_HPP_
