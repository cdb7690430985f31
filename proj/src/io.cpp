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

#include "riskenv/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "riskenv/error.hpp"

namespace riskenv::io
{

using nlohmann::json;

namespace
{

constexpr int kFormatVersion = 1;

std::string trim(const std::string & s)
{
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string & s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::optional<double> parse_double(const std::string & s)
{
  if (s.empty()) return std::nullopt;
  errno = 0;
  char * end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(const std::string & s)
{
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

json num9(double v) { return round9(v); }

json opt9(const std::optional<double> & v) { return v ? json(round9(*v)) : json(nullptr); }

json parse_json(const std::string & text, const std::string & what)
{
  try {
    return json::parse(text);
  } catch (const json::exception & e) {
    throw ValidationError(what + " is not valid JSON: " + e.what());
  }
}

/// Runs a JSON accessor block and turns library errors into schema errors.
template <class F>
auto schema(const std::string & what, F && f)
{
  try {
    return f();
  } catch (const json::exception & e) {
    throw ValidationError(what + " does not match its schema: " + e.what());
  }
}

void check_version(const json & j, const std::string & what)
{
  if (!j.is_object() || !j.contains("version")) throw ValidationError(what + " lacks a version field");
  if (j.at("version").get<int>() != kFormatVersion) {
    throw ValidationError(what + " has unsupported version " + j.at("version").dump());
  }
}

json histogram_json(const Histogram & h)
{
  json j;
  j["edges"] = json::array();
  for (double e : h.edges) j["edges"].push_back(num9(e));
  j["counts"] = h.counts;
  j["density"] = json::array();
  for (double d : h.density()) j["density"].push_back(num9(d));
  j["samples"] = h.total();
  return j;
}

json metrics_json(const MetricHistograms & m)
{
  json j = json::object();
  const auto all = m.all();
  for (std::size_t k = 0; k < all.size(); ++k) j[MetricHistograms::kNames[k]] = histogram_json(*all[k]);
  return j;
}

json wasserstein_json(const MetricHistograms & produced, const MetricHistograms & reference)
{
  json j = json::object();
  const auto a = produced.all();
  const auto b = reference.all();
  for (std::size_t k = 0; k < a.size(); ++k) j[MetricHistograms::kNames[k]] = opt9(wasserstein1(*a[k], *b[k]));
  return j;
}

}  // namespace

std::string fmt9(double v)
{
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double round9(double v) { return std::strtod(fmt9(v).c_str(), nullptr); }

std::string read_text(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path & p, const std::string & text)
{
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + p.string());
  out << text;
  if (!out) throw ValidationError("failed writing " + p.string());
}

// ---------------------------------------------------------------- trajectories

std::string recording_to_csv(const Recording & rec)
{
  struct Row
  {
    int frame;
    int id;
    const Track * track;
    const VehicleState * s;
  };
  std::vector<Row> rows;
  for (const Track & tr : rec.tracks) {
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      rows.push_back({tr.first_frame + static_cast<int>(k), tr.id, &tr, &tr.states[k]});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row & a, const Row & b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  std::string out = "frame,track_id,x,y,heading,length,width\n";
  for (const Row & r : rows) {
    out += std::to_string(r.frame) + ',' + std::to_string(r.id) + ',' + fmt9(r.s->px) + ',' +
           fmt9(r.s->py) + ',' + fmt9(r.s->heading()) + ',' + fmt9(r.track->dims.length) + ',' +
           fmt9(r.track->dims.width) + '\n';
  }
  return out;
}

Recording recording_from_csv(const std::string & text, double dt)
{
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trajectory file is empty");
  const std::vector<std::string> header = split(trim(line), ',');
  const std::array<std::string, 7> names{"frame", "track_id", "x", "y", "heading", "length", "width"};
  std::array<int, 7> col{};
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto it = std::find(header.begin(), header.end(), names[k]);
    if (it == header.end()) throw ValidationError("trajectory header lacks column '" + names[k] + "'");
    col[k] = static_cast<int>(it - header.begin());
  }

  std::map<int, Track> tracks;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split(trim(line), ',');
    if (f.size() != header.size()) {
      throw ValidationError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " fields");
    }
    const auto frame = parse_int(f[col[0]]);
    const auto id = parse_int(f[col[1]]);
    std::array<double, 5> v{};
    for (int k = 0; k < 5; ++k) {
      const auto d = parse_double(f[col[2 + k]]);
      if (!d) throw ValidationError("line " + std::to_string(lineno) + ": bad number '" + f[col[2 + k]] + "'");
      v[k] = *d;
    }
    if (!frame || !id) throw ValidationError("line " + std::to_string(lineno) + ": bad frame or id");
    if (!(v[3] > 0.0) || !(v[4] > 0.0)) {
      throw ValidationError("line " + std::to_string(lineno) + ": vehicle dims must be positive");
    }
    Track & tr = tracks[static_cast<int>(*id)];
    if (tr.states.empty()) {
      tr.id = static_cast<int>(*id);
      tr.first_frame = static_cast<int>(*frame);
      tr.dims = VehicleDims{v[3], v[4]};
    } else if (*frame != tr.last_frame() + 1) {
      throw ValidationError("track " + std::to_string(*id) + " is not contiguous at frame " +
                            std::to_string(*frame));
    }
    tr.states.push_back(VehicleState::from_heading(v[0], v[1], v[2]));
  }
  Recording rec;
  rec.dt = dt;
  for (auto & [id, tr] : tracks) rec.tracks.push_back(std::move(tr));
  return rec;
}

void write_recording(const fs::path & p, const Recording & rec) { write_text(p, recording_to_csv(rec)); }

Recording read_recording(const fs::path & p, double dt)
{
  try {
    return recording_from_csv(read_text(p), dt);
  } catch (const ValidationError & e) {
    throw ValidationError(p.filename().string() + ": " + e.what());
  }
}

std::vector<fs::path> list_recordings(const fs::path & dir)
{
  if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto & e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw ValidationError("no trajectory files in " + dir.string());
  return out;
}

// ---------------------------------------------------------------- key=value

KeyValues KeyValues::parse(const std::string & text, const std::string & origin)
{
  KeyValues kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.values_.emplace(key, trim(line.substr(eq + 1))).second) {
      throw ValidationError(origin + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

KeyValues KeyValues::load(const fs::path & p) { return parse(read_text(p), p.filename().string()); }

std::optional<std::string> KeyValues::take(const std::string & key)
{
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

double KeyValues::get(const std::string & key, double fallback)
{
  const auto s = take(key);
  if (!s) return fallback;
  const auto v = parse_double(*s);
  if (!v) throw ValidationError(origin_ + ": '" + key + "' expects a number");
  return *v;
}

int KeyValues::get(const std::string & key, int fallback)
{
  const auto s = take(key);
  if (!s) return fallback;
  const auto v = parse_int(*s);
  if (!v || *v < INT32_MIN || *v > INT32_MAX) {
    throw ValidationError(origin_ + ": '" + key + "' expects an integer");
  }
  return static_cast<int>(*v);
}

std::uint64_t KeyValues::get(const std::string & key, std::uint64_t fallback)
{
  const auto s = take(key);
  if (!s) return fallback;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
  if (ec != std::errc() || ptr != s->data() + s->size()) {
    throw ValidationError(origin_ + ": '" + key + "' expects an unsigned integer");
  }
  return v;
}

std::string KeyValues::get(const std::string & key, const std::string & fallback)
{
  const auto s = take(key);
  return s ? *s : fallback;
}

std::vector<double> KeyValues::get(const std::string & key, const std::vector<double> & fallback)
{
  const auto s = take(key);
  if (!s) return fallback;
  std::vector<double> out;
  if (s->empty()) return out;
  for (const std::string & part : split(*s, ',')) {
    const auto v = parse_double(part);
    if (!v) throw ValidationError(origin_ + ": '" + key + "' expects a comma-separated number list");
    out.push_back(*v);
  }
  return out;
}

void KeyValues::finish() const
{
  for (const auto & [key, value] : values_) {
    if (!used_.count(key)) throw ValidationError(origin_ + ": unknown key '" + key + "'");
  }
}

SyntheticDatasetConfig read_synthetic_config(KeyValues & kv)
{
  SyntheticDatasetConfig c;
  SyntheticWorldParams & w = c.world;
  w.ring_radius = kv.get("world.ring_radius", w.ring_radius);
  w.arms = kv.get("world.arms", w.arms);
  w.lane_offset = kv.get("world.lane_offset", w.lane_offset);
  w.yield_distance = kv.get("world.yield_distance", w.yield_distance);
  w.spawn_distance = kv.get("world.spawn_distance", w.spawn_distance);
  w.exit_distance = kv.get("world.exit_distance", w.exit_distance);
  w.nominal_speed = kv.get("world.nominal_speed", w.nominal_speed);
  w.ring_speed = kv.get("world.ring_speed", w.ring_speed);
  w.gap_threshold = kv.get("world.gap_threshold", w.gap_threshold);
  w.arrival_rate = kv.get("world.arrival_rate", w.arrival_rate);
  w.lateral_noise = kv.get("world.lateral_noise", w.lateral_noise);
  w.heading_noise = kv.get("world.heading_noise", w.heading_noise);
  w.speed_spread = kv.get("world.speed_spread", w.speed_spread);
  w.duration = kv.get("world.duration", w.duration);
  w.warmup = kv.get("world.warmup", w.warmup);
  w.dt = kv.get("world.dt", w.dt);
  w.seed = kv.get("world.seed", w.seed);
  c.thresholds = kv.get("dataset.thresholds", c.thresholds);
  kv.finish();
  w.validate();
  for (double g : c.thresholds) {
    if (!(g >= 0.0)) throw ValidationError("dataset thresholds must be non-negative");
  }
  return c;
}

std::string synthetic_config_text(const SyntheticDatasetConfig & c)
{
  const SyntheticWorldParams & w = c.world;
  std::string out = "# synthetic roundabout world\n";
  auto line = [&](const std::string & k, const std::string & v) { out += k + " = " + v + "\n"; };
  line("world.ring_radius", fmt9(w.ring_radius));
  line("world.arms", std::to_string(w.arms));
  line("world.lane_offset", fmt9(w.lane_offset));
  line("world.yield_distance", fmt9(w.yield_distance));
  line("world.spawn_distance", fmt9(w.spawn_distance));
  line("world.exit_distance", fmt9(w.exit_distance));
  line("world.nominal_speed", fmt9(w.nominal_speed));
  line("world.ring_speed", fmt9(w.ring_speed));
  line("world.gap_threshold", fmt9(w.gap_threshold));
  line("world.arrival_rate", fmt9(w.arrival_rate));
  line("world.lateral_noise", fmt9(w.lateral_noise));
  line("world.heading_noise", fmt9(w.heading_noise));
  line("world.speed_spread", fmt9(w.speed_spread));
  line("world.duration", fmt9(w.duration));
  line("world.warmup", fmt9(w.warmup));
  line("world.dt", fmt9(w.dt));
  line("world.seed", std::to_string(w.seed));
  std::string th;
  for (std::size_t i = 0; i < c.thresholds.size(); ++i) th += (i ? "," : "") + fmt9(c.thresholds[i]);
  line("dataset.thresholds", th);
  return out;
}

SceneConfig scene_for_data_dir(const fs::path & dir)
{
  const fs::path cfg = dir / "world.cfg";
  if (!fs::exists(cfg)) return roundabout_scene(SyntheticWorldParams{});
  KeyValues kv = KeyValues::load(cfg);
  return roundabout_scene(read_synthetic_config(kv).world);
}

TrainSettings read_train_config(KeyValues & kv)
{
  TrainSettings s;
  s.model.hidden = kv.get("model.hidden", s.model.hidden);
  s.model.context = kv.get("model.context", s.model.context);
  s.training.epochs = kv.get("train.epochs", s.training.epochs);
  s.training.batch_size = kv.get("train.batch_size", s.training.batch_size);
  s.training.learning_rate = kv.get("train.learning_rate", s.training.learning_rate);
  s.training.p_uncond = kv.get("train.p_uncond", s.training.p_uncond);
  s.training.high_risk = kv.get("train.high_risk", s.training.high_risk);
  s.training.high_risk_repeat = kv.get("train.high_risk_repeat", s.training.high_risk_repeat);
  s.offset_unit_m = kv.get("model.offset_unit_m", s.offset_unit_m);
  s.context_radius_m = kv.get("model.context_radius_m", s.context_radius_m);
  s.schedule_kind = kv.get("schedule.kind", s.schedule_kind);
  s.model.schedule_steps = kv.get("schedule.steps", s.model.schedule_steps);
  kv.finish();
  if (s.model.hidden < 1 || s.model.context < 1) throw ValidationError("model sizes must be positive");
  if (!(s.offset_unit_m > 0.0) || !(s.context_radius_m > 0.0)) {
    throw ValidationError("model length scales must be positive");
  }
  s.training.validate();
  return s;
}

void apply_metric_scales(const TrainSettings & s, const Normalizer & norm, ToyPredictorConfig & cfg)
{
  const double scale = 0.5 * (norm.stddev[0] + norm.stddev[1]);
  cfg.offset_scale = scale / s.offset_unit_m;
  cfg.context_radius = s.context_radius_m / scale;
}

SimulateSettings read_simulate_config(KeyValues & kv)
{
  SimulateSettings s;
  s.data_dir = kv.get("data_dir", s.data_dir);
  for (const std::string & c : split(kv.get("episode.clips", std::string()), ',')) {
    if (!c.empty()) s.clips.push_back(c);
  }
  s.sampler.omega = kv.get("sampler.omega", s.sampler.omega);
  s.sampler.alpha = kv.get("sampler.alpha", s.sampler.alpha);
  EpisodeConfig & e = s.experiment.episode;
  e.duration = kv.get("episode.duration", e.duration);
  e.init_clip = kv.get("episode.init_clip", e.init_clip);
  e.spawn_clearance = kv.get("episode.spawn_clearance", e.spawn_clearance);
  e.arrival_rates = kv.get("episode.arrival_rates", std::vector<double>{0.08, 0.08, 0.08, 0.08});
  e.volume_mode = parse_volume_mode(kv.get("episode.volume_mode", std::string("consistent")));
  s.experiment.risks = kv.get("experiment.risks", s.experiment.risks);
  s.experiment.episodes_per_risk = kv.get("experiment.episodes", s.experiment.episodes_per_risk);
  s.experiment.seed_groups = kv.get("experiment.seed_groups", s.experiment.seed_groups);
  s.write_logs = kv.get("output.episode_logs", 1) != 0;
  kv.finish();
  for (double r : s.experiment.risks) RiskLevel::of(r);
  s.sampler.validate();
  return s;
}

// ---------------------------------------------------------------- vocabulary

std::string vocabulary_to_json(const Vocabulary & v)
{
  json j;
  j["version"] = kFormatVersion;
  j["dt"] = num9(v.meta().dt);
  j["box_length"] = num9(v.meta().box.length);
  j["box_width"] = num9(v.meta().box.width);
  j["coverage_eps"] = num9(v.meta().coverage_eps);
  j["source_hash"] = v.meta().source_hash;
  j["tokens"] = json::array();
  for (const MotionToken & t : v.tokens()) {
    j["tokens"].push_back({t.dx, t.dy, t.dtheta});
  }
  return j.dump(1) + "\n";
}

Vocabulary vocabulary_from_json(const std::string & text)
{
  const json j = parse_json(text, "vocabulary");
  check_version(j, "vocabulary");
  return schema("vocabulary", [&] {
    VocabularyMeta meta;
    meta.dt = j.at("dt").get<double>();
    meta.box = VehicleDims{j.at("box_length").get<double>(), j.at("box_width").get<double>()};
    meta.coverage_eps = j.at("coverage_eps").get<double>();
    meta.source_hash = j.value("source_hash", std::string());
    if (!(meta.dt > 0.0) || !(meta.box.length > 0.0) || !(meta.box.width > 0.0)) {
      throw ValidationError("vocabulary dt and box must be positive");
    }
    std::vector<MotionToken> tokens;
    for (const json & t : j.at("tokens")) {
      if (!t.is_array() || t.size() != 3) throw ValidationError("vocabulary tokens must be triples");
      tokens.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
    }
    return Vocabulary(std::move(tokens), meta);
  });
}

void write_vocabulary(const fs::path & p, const Vocabulary & v) { write_text(p, vocabulary_to_json(v)); }
Vocabulary read_vocabulary(const fs::path & p) { return vocabulary_from_json(read_text(p)); }

// ---------------------------------------------------------------- model

std::string model_to_json(const DiffusionModel & m)
{
  const ToyPredictorConfig & c = m.predictor.config();
  json j;
  j["format"] = "riskenv-model";
  j["version"] = kFormatVersion;
  j["schedule"] = {{"kind", m.schedule.kind}, {"steps", m.schedule.steps}};
  j["normalizer"] = {{"mean", m.normalizer.mean}, {"std", m.normalizer.stddev}};
  json blocks = json::array();
  for (const auto & [name, range] : m.predictor.parameter_blocks()) {
    blocks.push_back({{"name", name}, {"offset", range.first}, {"size", range.second}});
  }
  j["predictor"] = {
    {"type", "toy-mlp"},
    {"window_steps", c.window_steps},
    {"hidden", c.hidden},
    {"context", c.context},
    {"schedule_steps", c.schedule_steps},
    {"offset_scale", c.offset_scale},
    {"context_radius", c.context_radius},
    {"step_embed_dim", kStepEmbedDim},
    {"risk_embed_dim", kRiskEmbedDim},
    {"risk_feature_dim", kRiskFeatureDim},
    {"position_features", kPositionFeatures},
    {"blocks", blocks}};
  const auto params = m.predictor.parameters();
  j["parameters"] = std::vector<double>(params.begin(), params.end());
  return j.dump() + "\n";
}

DiffusionModel model_from_json(const std::string & text)
{
  const json j = parse_json(text, "model");
  check_version(j, "model");
  return schema("model", [&] {
    if (j.at("format").get<std::string>() != "riskenv-model") {
      throw ValidationError("not a riskenv model file");
    }
    const json & p = j.at("predictor");
    if (p.at("type").get<std::string>() != "toy-mlp") throw ValidationError("unknown predictor type");
    if (p.at("step_embed_dim").get<int>() != kStepEmbedDim ||
        p.at("risk_embed_dim").get<int>() != kRiskEmbedDim ||
        p.at("risk_feature_dim").get<int>() != kRiskFeatureDim ||
        p.at("position_features").get<int>() != kPositionFeatures) {
      throw ValidationError("model embedding sizes do not match this build");
    }
    ToyPredictorConfig c;
    c.window_steps = p.at("window_steps").get<int>();
    c.hidden = p.at("hidden").get<int>();
    c.context = p.at("context").get<int>();
    c.schedule_steps = p.at("schedule_steps").get<int>();
    c.offset_scale = p.at("offset_scale").get<double>();
    c.context_radius = p.at("context_radius").get<double>();
    NoiseSchedule sched =
      make_schedule(j.at("schedule").at("kind").get<std::string>(), j.at("schedule").at("steps").get<int>());
    if (sched.steps != c.schedule_steps) throw ValidationError("schedule and predictor disagree on K");
    Normalizer norm;
    norm.mean = j.at("normalizer").at("mean").get<std::array<double, kStateDim>>();
    norm.stddev = j.at("normalizer").at("std").get<std::array<double, kStateDim>>();
    for (double s : norm.stddev) {
      if (!(s > 0.0)) throw ValidationError("normalizer std must be positive");
    }
    ToyPredictor pred(c, j.at("parameters").get<std::vector<double>>());
    return DiffusionModel{std::move(sched), norm, std::move(pred)};
  });
}

void write_model(const fs::path & p, const DiffusionModel & m) { write_text(p, model_to_json(m)); }
DiffusionModel read_model(const fs::path & p) { return model_from_json(read_text(p)); }

// ---------------------------------------------------------------- labels

std::string labels_to_json(const LabelFile & f)
{
  json j;
  j["version"] = kFormatVersion;
  j["data_dir"] = f.data_dir;
  j["risk_params"] = {{"k", num9(f.params.k)}, {"sigma", num9(f.params.sigma)}, {"t_norm", num9(f.params.t_norm)}};
  j["horizon"] = f.horizon;
  j["max_agents"] = f.max_agents;
  j["recordings"] = f.recordings;
  j["windows"] = json::array();
  for (const WindowLabel & w : f.windows) {
    j["windows"].push_back({{"recording", w.recording}, {"t0", w.t0}, {"pet", opt9(w.pet)}, {"risk", num9(w.risk)}});
  }
  return j.dump(1) + "\n";
}

LabelFile labels_from_json(const std::string & text)
{
  const json j = parse_json(text, "labels");
  check_version(j, "labels");
  return schema("labels", [&] {
    LabelFile f;
    f.data_dir = j.at("data_dir").get<std::string>();
    f.params.k = j.at("risk_params").at("k").get<double>();
    f.params.sigma = j.at("risk_params").at("sigma").get<double>();
    f.params.t_norm = j.at("risk_params").at("t_norm").get<double>();
    f.params.validate();
    f.horizon = j.at("horizon").get<int>();
    f.max_agents = j.at("max_agents").get<int>();
    f.recordings = j.at("recordings").get<std::vector<std::string>>();
    for (const json & w : j.at("windows")) {
      WindowLabel l;
      l.recording = w.at("recording").get<int>();
      l.t0 = w.at("t0").get<int>();
      if (!w.at("pet").is_null()) l.pet = w.at("pet").get<double>();
      l.risk = w.at("risk").get<double>();
      if (l.recording < 0 || l.recording >= static_cast<int>(f.recordings.size()) || l.t0 < 0) {
        throw ValidationError("label references an unknown recording or negative offset");
      }
      if (!(l.risk >= 0.0 && l.risk <= 1.0)) throw RangeError("label risk outside [0, 1]");
      f.windows.push_back(std::move(l));
    }
    return f;
  });
}

std::vector<WindowLabel> load_labeled_windows(const fs::path & label_file)
{
  LabelFile f = labels_from_json(read_text(label_file));
  fs::path dir = f.data_dir;
  if (dir.is_relative() && !fs::exists(dir)) dir = label_file.parent_path() / dir;
  const SceneConfig scene = scene_for_data_dir(dir);
  std::vector<Recording> recs;
  std::vector<JointTrajectory> joints;
  for (const std::string & name : f.recordings) {
    recs.push_back(read_recording(dir / name, scene.dt));
    joints.push_back(to_joint(recs.back()));
  }
  for (WindowLabel & w : f.windows) {
    const Recording & rec = recs[w.recording];
    if (w.t0 + f.horizon > joints[w.recording].steps()) throw RangeError("label window out of range");
    w.window = recording_window(rec, joints[w.recording], w.t0, f.horizon, f.max_agents);
  }
  return std::move(f.windows);
}

// ---------------------------------------------------------------- episodes and reports

std::string episode_events_json(const EpisodeLog & log)
{
  json j;
  j["version"] = kFormatVersion;
  j["seed"] = log.seed;
  j["risk"] = num9(log.risk);
  j["volume_multiplier"] = num9(log.volume_multiplier);
  j["arrival_rates"] = json::array();
  for (double r : log.arrival_rates) j["arrival_rates"].push_back(num9(r));
  j["duration"] = num9(log.duration);
  j["init_clip"] = num9(log.init_clip);
  j["clip_recording"] = log.clip_recording;
  j["clip_frame"] = log.clip_frame;
  j["dt"] = num9(log.joint.dt());
  j["steps"] = log.joint.steps();
  j["agents"] = log.joint.agents();
  j["warmup_steps"] = log.warmup_steps;
  j["arrivals"] = json::array();
  for (const ArrivalEvent & a : log.arrivals) {
    j["arrivals"].push_back({{"step", a.step}, {"agent", a.agent}, {"zone", a.zone}});
  }
  j["exits"] = json::array();
  for (const ExitEvent & e : log.exits) {
    j["exits"].push_back({{"step", e.step}, {"agent", e.agent}, {"reason", e.reason}});
  }
  j["collisions"] = json::array();
  for (const Collision & c : log.collisions) {
    j["collisions"].push_back({{"step", c.step}, {"i", c.i}, {"j", c.j}});
  }
  j["window_pets"] = json::array();
  for (const WindowPet & w : log.window_pets) j["window_pets"].push_back({{"t0", w.t0}, {"pet", opt9(w.pet)}});
  j["realized_risk"] = num9(log.realized_risk);
  j["dropped_arrivals"] = log.dropped_arrivals;
  j["rejected_spawns"] = log.rejected_spawns;
  j["crashed"] = log.crashed();
  return j.dump(1) + "\n";
}

void write_episode(const fs::path & dir, const std::string & stem, const EpisodeLog & log)
{
  write_recording(dir / (stem + ".csv"), from_joint(log.joint, log.ids, log.dims, 0));
  write_text(dir / (stem + ".json"), episode_events_json(log));
}

EpisodeLog read_episode(const fs::path & csv, const fs::path & sidecar, double dt)
{
  const json j = parse_json(read_text(sidecar), sidecar.filename().string());
  check_version(j, "episode sidecar");
  const Recording rec = read_recording(csv, dt);
  return schema("episode sidecar", [&] {
    EpisodeLog log;
    const int agents = j.at("agents").get<int>();
    const int steps = j.at("steps").get<int>();
    log.joint = JointTrajectory(agents, steps, dt);
    log.dims.assign(agents, VehicleDims{});
    for (int i = 0; i < agents; ++i) log.ids.push_back(i + 1);
    for (const Track & tr : rec.tracks) {
      const int a = tr.id - 1;
      if (a < 0 || a >= agents || tr.first_frame < 0 || tr.last_frame() >= steps) {
        throw ValidationError("episode trajectory does not match its sidecar");
      }
      log.dims[a] = tr.dims;
      for (std::size_t k = 0; k < tr.states.size(); ++k) {
        log.joint.set_state(a, tr.first_frame + static_cast<int>(k), tr.states[k]);
      }
    }
    log.seed = j.at("seed").get<std::uint64_t>();
    log.risk = j.at("risk").get<double>();
    log.warmup_steps = j.at("warmup_steps").get<int>();
    for (const json & c : j.at("collisions")) {
      log.collisions.push_back({c.at("step").get<int>(), c.at("i").get<int>(), c.at("j").get<int>()});
    }
    for (const json & w : j.at("window_pets")) {
      WindowPet wp;
      wp.t0 = w.at("t0").get<int>();
      if (!w.at("pet").is_null()) wp.pet = w.at("pet").get<double>();
      log.window_pets.push_back(wp);
    }
    return log;
  });
}

std::string histogram_csv(const Histogram & h)
{
  std::string out = "bin_left,bin_right,count,density\n";
  const std::vector<double> d = h.density();
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += fmt9(h.edges[i]) + ',' + fmt9(h.edges[i + 1]) + ',' + std::to_string(h.counts[i]) + ',' +
           fmt9(d[i]) + '\n';
  }
  return out;
}

std::string histograms_json(const MetricHistograms & m)
{
  json j;
  j["version"] = kFormatVersion;
  j["histograms"] = metrics_json(m);
  return j.dump(1) + "\n";
}

MetricHistograms histograms_from_json(const std::string & text)
{
  const json j = parse_json(text, "histograms");
  check_version(j, "histograms");
  return schema("histograms", [&] {
    MetricHistograms m;
    auto all = m.all();
    for (std::size_t k = 0; k < all.size(); ++k) {
      const json & h = j.at("histograms").at(MetricHistograms::kNames[k]);
      const auto edges = h.at("edges").get<std::vector<double>>();
      const auto counts = h.at("counts").get<std::vector<std::int64_t>>();
      if (edges.size() != all[k]->edges.size()) {
        throw ValidationError(std::string("histogram '") + MetricHistograms::kNames[k] + "' has mismatched bin edges");
      }
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (std::abs(edges[i] - all[k]->edges[i]) > 1e-9) {
          throw ValidationError(std::string("histogram '") + MetricHistograms::kNames[k] + "' has mismatched bin edges");
        }
      }
      if (counts.size() != all[k]->counts.size()) throw ValidationError("histogram count length mismatch");
      for (auto c : counts) {
        if (c < 0) throw ValidationError("histogram counts must be non-negative");
      }
      all[k]->counts = counts;
    }
    return m;
  });
}

std::string experiment_report_json(
  const ExperimentReport & r, const ExperimentConfig & cfg,
  const std::optional<MetricHistograms> & reference)
{
  json j;
  j["version"] = kFormatVersion;
  j["seed"] = cfg.seed;
  j["episodes"] = r.episodes;
  j["crashes"] = r.crashes;
  j["crash_rate"] = num9(r.episodes ? static_cast<double>(r.crashes) / r.episodes : 0.0);
  j["volume_mode"] = to_string(cfg.episode.volume_mode);
  j["seed_groups"] = cfg.seed_groups;
  j["levels"] = json::array();
  for (const RiskLevelSummary & s : r.levels) {
    json l;
    l["risk_level"] = num9(s.risk);
    l["episodes"] = s.episodes;
    l["crashes"] = s.crashes;
    l["crash_rate"] = num9(s.crash_rate);
    l["crash_rate_min"] = num9(s.crash_rate_min);
    l["crash_rate_max"] = num9(s.crash_rate_max);
    l["group_crash_rates"] = json::array();
    for (double g : s.group_crash_rates) l["group_crash_rates"].push_back(num9(g));
    l["windows"] = s.windows;
    l["windows_pet_below_1s"] = s.windows_pet_below_1s;
    l["pet_below_1s"] = num9(s.pet_below_1s);
    l["seeds"] = s.seeds;
    l["histograms"] = metrics_json(s.metrics);
    if (reference) l["wasserstein"] = wasserstein_json(s.metrics, *reference);
    j["levels"].push_back(l);
  }
  return j.dump(1) + "\n";
}

std::string realism_report_json(const RealismReport & r, const std::vector<std::uint64_t> & seeds)
{
  json j;
  j["version"] = kFormatVersion;
  j["episodes"] = r.episodes;
  j["crashes"] = r.crashes;
  j["crash_rate"] = num9(r.crash_rate);
  j["seeds"] = seeds;
  j["histograms"] = metrics_json(r.produced);
  j["wasserstein"] = json::object();
  for (std::size_t k = 0; k < r.wasserstein.size(); ++k) {
    j["wasserstein"][MetricHistograms::kNames[k]] = opt9(r.wasserstein[k]);
  }
  return j.dump(1) + "\n";
}

void write_histogram_csvs(const fs::path & dir, const std::string & prefix, const MetricHistograms & m)
{
  const auto all = m.all();
  for (std::size_t k = 0; k < all.size(); ++k) {
    write_text(dir / (prefix + MetricHistograms::kNames[k] + ".csv"), histogram_csv(*all[k]));
  }
}

}  // namespace riskenv::io
