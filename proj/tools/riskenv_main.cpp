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

// riskenv command-line tool. Run `riskenv --help` for the subcommand list.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskenv/closed_loop.hpp"
#include "riskenv/dataset.hpp"
#include "riskenv/error.hpp"
#include "riskenv/io.hpp"
#include "riskenv/motion_vocab.hpp"
#include "riskenv/realism.hpp"
#include "riskenv/rng.hpp"
#include "riskenv/synthetic.hpp"
#include "riskenv/toy_predictor.hpp"

namespace fs = std::filesystem;
using namespace riskenv;

namespace
{

struct Options
{
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> seed_flag;
  std::string config;
  std::string out;
  std::string data;
  std::string labels;
  std::string model;
  std::string vocab;
  std::string init;
  std::string logs;
  std::string reference;
  std::optional<double> risk;
  std::optional<int> episodes;
  int workers = 1;
  std::optional<int> frame;
};

io::KeyValues load_config(const Options & o)
{
  return o.config.empty() ? io::KeyValues::parse("", "defaults") : io::KeyValues::load(o.config);
}

void require_file(const std::string & p, const std::string & what)
{
  if (p.empty()) throw UsageError(what + " is required");
  if (!fs::exists(p)) throw ValidationError(what + " not found: " + p);
}

std::vector<Recording> load_recordings(
  const fs::path & dir, double dt, std::vector<std::string> * names = nullptr)
{
  std::vector<Recording> recs;
  for (const fs::path & p : io::list_recordings(dir)) {
    recs.push_back(io::read_recording(p, dt));
    if (names) names->push_back(p.filename().string());
  }
  return recs;
}

int cmd_gen_synthetic(const Options & o)
{
  if (o.out.empty()) throw UsageError("--out is required");
  io::KeyValues kv = load_config(o);
  io::SyntheticDatasetConfig cfg = io::read_synthetic_config(kv);
  if (o.seed_flag) cfg.world.seed = *o.seed_flag;
  const std::vector<Recording> recs = gen_synthetic_dataset(cfg.world, cfg.thresholds);
  const fs::path dir = o.out;
  fs::create_directories(dir);
  io::write_text(dir / "world.cfg", io::synthetic_config_text(cfg));
  for (std::size_t i = 0; i < recs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "rec_%02zu.csv", i);
    io::write_recording(dir / name, recs[i]);
  }
  std::printf("wrote %zu recordings to %s\n", recs.size(), dir.string().c_str());
  return 0;
}

int cmd_build_vocab(const Options & o)
{
  if (o.data.empty() || o.out.empty()) throw UsageError("--data and --out are required");
  io::KeyValues kv = load_config(o);
  KDisksParams p;
  p.vocab_size = kv.get("vocab.size", p.vocab_size);
  p.candidates_per_round = kv.get("vocab.candidates", p.candidates_per_round);
  p.coverage_eps = kv.get("vocab.coverage_eps", p.coverage_eps);
  kv.finish();
  p.seed = o.seed;
  p.validate();

  const SceneConfig scene = io::scene_for_data_dir(o.data);
  std::vector<Trajectory> trajs;
  for (const Recording & rec : load_recordings(o.data, scene.dt)) {
    for (const Track & t : rec.tracks) trajs.push_back({t.states, rec.dt});
  }
  const std::vector<MotionToken> transitions = extract_transitions(trajs, scene.dt);
  const Vocabulary v = build_vocabulary(transitions, p, scene.dt);
  io::write_vocabulary(o.out, v);
  std::printf(
    "vocabulary: %zu tokens from %zu transitions, coverage radius %s m\n", v.size(), transitions.size(),
    io::fmt9(coverage_radius(transitions, v)).c_str());
  return 0;
}

int cmd_label_risk(const Options & o)
{
  if (o.data.empty() || o.out.empty()) throw UsageError("--data and --out are required");
  io::KeyValues kv = load_config(o);
  io::LabelFile f;
  f.params.k = kv.get("risk.k", f.params.k);
  f.params.sigma = kv.get("risk.sigma", f.params.sigma);
  f.params.t_norm = kv.get("risk.t_norm", f.params.t_norm);
  kv.finish();
  f.params.validate();

  const SceneConfig scene = io::scene_for_data_dir(o.data);
  const std::vector<Recording> recs = load_recordings(o.data, scene.dt, &f.recordings);
  f.windows = label_dataset(recs, scene, f.params);
  f.data_dir = fs::absolute(o.data).lexically_normal().string();
  f.horizon = scene.horizon_steps;
  f.max_agents = scene.max_agents;
  io::write_text(o.out, io::labels_to_json(f));
  std::printf("labeled %zu windows\n", f.windows.size());
  return 0;
}

int cmd_train(const Options & o)
{
  require_file(o.labels, "--labels");
  if (o.out.empty()) throw UsageError("--out is required");
  io::KeyValues kv = load_config(o);
  io::TrainSettings s = io::read_train_config(kv);

  const std::vector<WindowLabel> labels = io::load_labeled_windows(o.labels);
  if (labels.empty()) throw ValidationError("label file has no windows");
  std::vector<JointTrajectory> windows;
  for (const WindowLabel & l : labels) windows.push_back(l.window);
  const Normalizer norm = Normalizer::fit(windows);
  const std::vector<LabeledWindow> data = training_windows(labels, norm);

  NoiseSchedule sched = make_schedule(s.schedule_kind, s.model.schedule_steps);
  s.model.window_steps = labels.front().window.steps();
  s.model.seed = derive_seed(o.seed, {0});
  s.training.seed = derive_seed(o.seed, {1});
  io::apply_metric_scales(s, norm, s.model);
  ToyPredictor pred(s.model);
  const TrainResult r = train(pred, data, s.training, sched, [](int epoch, double loss) {
    std::fprintf(stderr, "epoch %d loss %s\n", epoch + 1, io::fmt9(loss).c_str());
  });
  io::write_model(o.out, DiffusionModel{std::move(sched), norm, std::move(pred)});
  std::printf(
    "trained %d epochs on %zu windows: loss %s -> %s\n", s.training.epochs, data.size(),
    io::fmt9(r.initial_loss).c_str(), io::fmt9(r.final_loss).c_str());
  return 0;
}

int cmd_sample(const Options & o)
{
  if (!o.risk) throw UsageError("--risk is required");
  const RiskLevel r = RiskLevel::of(*o.risk);
  require_file(o.model, "--model");
  require_file(o.vocab, "--vocab");
  require_file(o.init, "--init");
  if (o.out.empty()) throw UsageError("--out is required");
  io::KeyValues kv = load_config(o);
  SamplerConfig sc;
  sc.omega = kv.get("sampler.omega", sc.omega);
  sc.alpha = kv.get("sampler.alpha", sc.alpha);
  const int max_agents = kv.get("sample.max_agents", 12);
  kv.finish();
  sc.validate();

  const DiffusionModel m = io::read_model(o.model);
  const Vocabulary v = io::read_vocabulary(o.vocab);
  const Recording init = io::read_recording(o.init, v.meta().dt);
  if (init.tracks.empty()) throw ValidationError("initial-state file has no vehicles");
  const int frame = o.frame.value_or(init.first_frame());

  std::vector<std::optional<VehicleState>> current;
  std::vector<int> ids;
  std::vector<VehicleDims> dims;
  for (const Track & t : init.tracks) {
    if (frame < t.first_frame || frame > t.last_frame()) continue;
    if (static_cast<int>(current.size()) == max_agents) break;
    current.push_back(t.states[frame - t.first_frame]);
    ids.push_back(t.id);
    dims.push_back(t.dims);
  }
  if (current.empty()) throw ValidationError("no vehicle is present at frame " + std::to_string(frame));
  const JointTrajectory raw = sample(
    m.predictor, current, m.predictor.config().window_steps, v.meta().dt, r, sc, m.schedule,
    m.normalizer, o.seed);
  const JointTrajectory fixed = dynamics_check(raw, v);
  io::write_recording(o.out, from_joint(fixed, ids, dims, frame));
  std::printf("sampled %zu agents x %d steps at r=%s\n", current.size(), fixed.steps(), io::fmt9(*o.risk).c_str());
  return 0;
}

int cmd_simulate(const Options & o)
{
  require_file(o.model, "--model");
  require_file(o.vocab, "--vocab");
  if (o.out.empty()) throw UsageError("--out is required");
  io::KeyValues kv = load_config(o);
  io::SimulateSettings s = io::read_simulate_config(kv);
  if (!o.data.empty()) s.data_dir = o.data;
  if (s.data_dir.empty()) throw UsageError("a data directory is required (--data or data_dir)");
  if (!o.config.empty() && fs::path(s.data_dir).is_relative() && !fs::exists(s.data_dir)) {
    s.data_dir = (fs::path(o.config).parent_path() / s.data_dir).string();
  }
  if (o.risk) s.experiment.risks = {*o.risk};
  if (o.episodes) s.experiment.episodes_per_risk = *o.episodes;
  s.experiment.seed = o.seed;
  s.experiment.workers = o.workers;
  if (s.experiment.episodes_per_risk < s.experiment.seed_groups) {
    s.experiment.seed_groups = std::max(1, s.experiment.episodes_per_risk);
  }

  const DiffusionModel m = io::read_model(o.model);
  const Vocabulary v = io::read_vocabulary(o.vocab);
  const SceneConfig scene = io::scene_for_data_dir(s.data_dir);
  std::vector<std::string> names;
  const std::vector<Recording> all = load_recordings(s.data_dir, scene.dt, &names);
  std::vector<Recording> clips;
  if (s.clips.empty()) {
    clips = all;
  } else {
    for (const std::string & c : s.clips) {
      const auto it = std::find(names.begin(), names.end(), c);
      if (it == names.end()) throw ValidationError("clip recording not found: " + c);
      clips.push_back(all[it - names.begin()]);
    }
  }
  MetricHistograms reference;
  for (const Recording & rec : all) reference.merge(recording_metrics(rec, scene));

  const EpisodeContext ctx{m.predictor, v, scene, m.schedule, m.normalizer, s.sampler, clips};
  std::vector<EpisodeLog> logs;
  const ExperimentReport rep = run_experiment(ctx, s.experiment, &logs);

  const fs::path out = o.out;
  fs::create_directories(out);
  io::write_text(out / "report.json", io::experiment_report_json(rep, s.experiment, reference));
  io::write_text(out / "reference_histograms.json", io::histograms_json(reference));
  if (s.write_logs) {
    const int n = s.experiment.episodes_per_risk;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      char stem[48];
      std::snprintf(stem, sizeof stem, "ep_r%zu_%04zu", i / n, i % n);
      io::write_episode(out / "episodes", stem, logs[i]);
    }
  }
  for (const RiskLevelSummary & l : rep.levels) {
    std::printf(
      "r=%s episodes=%d crashes=%d crash_rate=%s pet_below_1s=%s\n", io::fmt9(l.risk).c_str(), l.episodes,
      l.crashes, io::fmt9(l.crash_rate).c_str(), io::fmt9(l.pet_below_1s).c_str());
  }
  return 0;
}

int cmd_evaluate(const Options & o)
{
  if (o.logs.empty() || o.reference.empty() || o.out.empty()) {
    throw UsageError("--logs, --reference and --out are required");
  }
  if (!fs::is_directory(o.logs)) throw ValidationError("log directory not found: " + o.logs);
  if (!fs::exists(o.reference)) throw ValidationError("reference not found: " + o.reference);
  const fs::path scene_dir = !o.data.empty() ? fs::path(o.data)
                             : fs::is_directory(o.reference) ? fs::path(o.reference)
                                                             : fs::path();
  const SceneConfig scene =
    scene_dir.empty() ? roundabout_scene(SyntheticWorldParams{}) : io::scene_for_data_dir(scene_dir);

  MetricHistograms reference;
  if (fs::is_directory(o.reference)) {
    for (const Recording & rec : load_recordings(o.reference, scene.dt)) {
      reference.merge(recording_metrics(rec, scene));
    }
  } else {
    reference = io::histograms_from_json(io::read_text(o.reference));
  }

  std::vector<fs::path> sidecars;
  for (const auto & e : fs::directory_iterator(o.logs)) {
    if (e.is_regular_file() && e.path().extension() == ".json") sidecars.push_back(e.path());
  }
  std::sort(sidecars.begin(), sidecars.end());
  if (sidecars.empty()) throw ValidationError("no episode logs in " + o.logs);
  std::vector<EpisodeLog> logs;
  std::vector<std::uint64_t> seeds;
  for (const fs::path & sc : sidecars) {
    fs::path csv = sc;
    csv.replace_extension(".csv");
    logs.push_back(io::read_episode(csv, sc, scene.dt));
    seeds.push_back(logs.back().seed);
  }
  const RealismReport r = realism_report(logs, reference, scene);
  io::write_text(o.out, io::realism_report_json(r, seeds));
  std::printf(
    "evaluated %d episodes: crash_rate=%s\n", r.episodes, io::fmt9(r.crash_rate).c_str());
  return 0;
}

void print_error(const std::string & kind, int code, const std::string & msg)
{
  std::string m;
  for (char c : msg) {
    if (c == '"' || c == '\\') m += '\\';
    m += (c == '\n') ? ' ' : c;
  }
  std::fprintf(stderr, "error: code=%d kind=%s msg=\"%s\"\n", code, kind.c_str(), m.c_str());
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"riskenv: risk-conditioned traffic scenario generation"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&](CLI::App * c) {
    c->add_option("--seed", o.seed_flag, "random seed (default 1)");
  };
  auto add_config = [&](CLI::App * c) {
    c->add_option("--config", o.config, "key = value config file");
  };

  CLI::App * gen = app.add_subcommand("gen-synthetic", "generate synthetic roundabout recordings");
  add_seed(gen);
  add_config(gen);
  gen->add_option("--out", o.out, "output data directory");

  CLI::App * vocab = app.add_subcommand("build-vocab", "build the motion-token vocabulary");
  add_seed(vocab);
  add_config(vocab);
  vocab->add_option("--data", o.data, "data directory");
  vocab->add_option("--out", o.out, "vocabulary JSON file");

  CLI::App * label = app.add_subcommand("label-risk", "label sliding windows with PET risk");
  add_config(label);
  label->add_option("--data", o.data, "data directory");
  label->add_option("--out", o.out, "labels JSON file");

  CLI::App * trn = app.add_subcommand("train", "train the toy noise predictor");
  add_seed(trn);
  add_config(trn);
  trn->add_option("--labels", o.labels, "labels JSON file");
  trn->add_option("--out", o.out, "model JSON file");

  CLI::App * smp = app.add_subcommand("sample", "sample one risk-conditioned joint future");
  add_seed(smp);
  add_config(smp);
  smp->add_option("--model", o.model, "model JSON file");
  smp->add_option("--vocab", o.vocab, "vocabulary JSON file");
  smp->add_option("--init", o.init, "trajectory CSV holding the current states");
  smp->add_option("--frame", o.frame, "frame of --init to condition on (default: first)");
  smp->add_option("--risk", o.risk, "risk level in [0, 1]");
  smp->add_option("--out", o.out, "output trajectory CSV");

  CLI::App * sim = app.add_subcommand("simulate", "run closed-loop episodes over a risk grid");
  add_seed(sim);
  add_config(sim);
  sim->add_option("--model", o.model, "model JSON file");
  sim->add_option("--vocab", o.vocab, "vocabulary JSON file");
  sim->add_option("--data", o.data, "data directory (overrides data_dir)");
  sim->add_option("--risk", o.risk, "single risk level instead of the configured grid");
  sim->add_option("--episodes", o.episodes, "episodes per risk level");
  sim->add_option("--workers", o.workers, "parallel episode workers")->check(CLI::PositiveNumber);
  sim->add_option("--out", o.out, "output directory");

  CLI::App * ev = app.add_subcommand("evaluate", "realism report for a set of episode logs");
  ev->add_option("--logs", o.logs, "directory of episode logs");
  ev->add_option("--reference", o.reference, "reference histograms JSON or data directory");
  ev->add_option("--data", o.data, "data directory defining the scene");
  ev->add_option("--out", o.out, "realism report JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    print_error("usage", static_cast<int>(ExitCode::kUsage), e.what());
    return static_cast<int>(ExitCode::kUsage);
  }
  if (o.seed_flag) o.seed = *o.seed_flag;

  try {
    if (*gen) return cmd_gen_synthetic(o);
    if (*vocab) return cmd_build_vocab(o);
    if (*label) return cmd_label_risk(o);
    if (*trn) return cmd_train(o);
    if (*smp) return cmd_sample(o);
    if (*sim) return cmd_simulate(o);
    if (*ev) return cmd_evaluate(o);
  } catch (const Error & e) {
    print_error(e.kind(), static_cast<int>(e.code()), e.what());
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error & e) {
    print_error("io", static_cast<int>(ExitCode::kValidation), e.what());
    return static_cast<int>(ExitCode::kValidation);
  } catch (const std::exception & e) {
    print_error("internal", static_cast<int>(ExitCode::kNumerical), e.what());
    return static_cast<int>(ExitCode::kNumerical);
  }
  return static_cast<int>(ExitCode::kUsage);
}
