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

#include "riskenv/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "riskenv/error.hpp"
#include "riskenv/geometry.hpp"
#include "riskenv/rng.hpp"

namespace riskenv
{

VolumeMode parse_volume_mode(const std::string & s)
{
  if (s == "consistent") return VolumeMode::kConsistent;
  if (s == "risk-scaled") return VolumeMode::kRiskScaled;
  throw ValidationError("unknown volume mode '" + s + "'");
}

std::string to_string(VolumeMode m)
{
  return m == VolumeMode::kConsistent ? "consistent" : "risk-scaled";
}

double volume_multiplier(double r, VolumeMode mode)
{
  if (mode == VolumeMode::kConsistent) return 1.0;
  if (!(r >= 0.3 && r <= 1.0)) throw RangeError("risk-scaled volume needs r in [0.3, 1.0]");
  return 0.5 + (r - 0.3) / (1.0 - 0.3);
}

std::vector<SpawnRequest> spawn_arrivals(
  std::mt19937_64 & rng, std::span<const double> rates, double dt, const SceneConfig & scene)
{
  if (rates.size() > scene.entry_zones.size()) {
    throw ValidationError("more arrival rates than entry zones");
  }
  std::vector<SpawnRequest> out;
  for (std::size_t z = 0; z < rates.size(); ++z) {
    if (!(rates[z] >= 0.0)) throw RangeError("arrival rates must be non-negative");
    if (rates[z] == 0.0) continue;
    std::poisson_distribution<int> count(rates[z] * dt);
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
      out.push_back({static_cast<int>(z), scene.entry_zones[z].pose, scene.default_dims});
    }
  }
  return out;
}

void EpisodeConfig::validate(const SceneConfig & scene) const
{
  if (!(duration > init_clip) || !(init_clip >= 0.0)) {
    throw ValidationError("episode needs duration > init_clip >= 0");
  }
  if (risk.is_unconditional()) throw RangeError("episodes need a risk value");
  if (!(spawn_clearance >= 0.0)) throw ValidationError("spawn clearance must be non-negative");
  if (arrival_rates.size() > scene.entry_zones.size()) {
    throw ValidationError("more arrival rates than entry zones");
  }
  for (double r : arrival_rates) {
    if (!(r >= 0.0)) throw RangeError("arrival rates must be non-negative");
  }
  volume_multiplier(risk.value(), volume_mode);
}

namespace
{

struct Agent
{
  VehicleDims dims;
  int first = 0;
  std::vector<VehicleState> states;
  bool live = true;

  int last() const { return first + static_cast<int>(states.size()) - 1; }
};

bool overlaps_any(
  const OrientedBox & box, const std::vector<Agent> & agents, int step)
{
  for (const Agent & a : agents) {
    if (step < a.first || step > a.last()) continue;
    if (boxes_overlap(box, OrientedBox::of(a.states[step - a.first], a.dims))) return true;
  }
  return false;
}

}  // namespace

EpisodeLog run_episode(const EpisodeContext & ctx, const EpisodeConfig & cfg)
{
  const SceneConfig & scene = ctx.scene;
  cfg.validate(scene);
  ctx.sampler.validate();
  if (std::abs(ctx.vocab.meta().dt - scene.dt) > 1e-9) {
    throw ValidationError("vocabulary dt does not match the scene dt");
  }
  const double dt = scene.dt;
  const int steps = static_cast<int>(std::lround(cfg.duration / dt)) + 1;
  const int warm = static_cast<int>(std::lround(cfg.init_clip / dt));

  EpisodeLog log;
  log.seed = cfg.seed;
  log.risk = cfg.risk.value();
  log.volume_multiplier = volume_multiplier(cfg.risk.value(), cfg.volume_mode);
  log.arrival_rates = cfg.arrival_rates;
  log.duration = cfg.duration;
  log.init_clip = cfg.init_clip;
  log.warmup_steps = warm;

  std::vector<double> rates(cfg.arrival_rates);
  for (double & r : rates) r *= log.volume_multiplier;

  std::vector<Agent> agents;

  // warmup replay of a uniformly chosen clip
  std::vector<std::size_t> usable;
  for (std::size_t r = 0; r < ctx.clips.size(); ++r) {
    const Recording & rec = ctx.clips[r];
    if (std::abs(rec.dt - dt) > 1e-9) throw ValidationError("clip dt does not match the scene dt");
    if (!rec.tracks.empty() && rec.last_frame() - rec.first_frame() >= warm) usable.push_back(r);
  }
  if (!usable.empty()) {
    std::mt19937_64 clip_rng(derive_seed(cfg.seed, {1}));
    const std::size_t r = usable[std::uniform_int_distribution<std::size_t>(
      0, usable.size() - 1)(clip_rng)];
    const Recording & rec = ctx.clips[r];
    const int f0 = std::uniform_int_distribution<int>(
      rec.first_frame(), rec.last_frame() - warm)(clip_rng);
    log.clip_recording = static_cast<int>(r);
    log.clip_frame = f0;
    for (const Track & tr : rec.tracks) {
      if (static_cast<int>(agents.size()) >= scene.max_agents) break;
      const int a = std::max(tr.first_frame, f0);
      const int b = std::min(tr.last_frame(), f0 + warm);
      if (a > b) continue;
      Agent ag;
      ag.dims = tr.dims;
      ag.first = a - f0;
      for (int f = a; f <= b; ++f) ag.states.push_back(tr.states[f - tr.first_frame]);
      ag.live = ag.last() == warm;
      const int id = static_cast<int>(agents.size());
      log.arrivals.push_back({ag.first, id, -1});
      if (!ag.live) log.exits.push_back({ag.last(), id, "clip"});
      agents.push_back(std::move(ag));
    }
  }

  std::mt19937_64 arrival_rng(derive_seed(cfg.seed, {0}));
  std::vector<SpawnRequest> retries;
  for (int t = warm; t + 1 < steps; ++t) {
    std::vector<int> live;
    for (int i = 0; i < static_cast<int>(agents.size()); ++i) {
      if (agents[i].live) live.push_back(i);
    }

    if (!live.empty()) {
      std::vector<std::optional<VehicleState>> current(scene.max_agents);
      for (std::size_t k = 0; k < live.size(); ++k) current[k] = agents[live[k]].states.back();
      const JointTrajectory raw = sample(
        ctx.predictor, current, scene.horizon_steps, dt, cfg.risk, ctx.sampler, ctx.schedule,
        ctx.normalizer, derive_seed(cfg.seed, {2, static_cast<std::uint64_t>(t)}));
      const JointTrajectory fixed = dynamics_check(raw, ctx.vocab);
      for (std::size_t k = 0; k < live.size(); ++k) {
        agents[live[k]].states.push_back(fixed.state(static_cast<int>(k), 1));
      }
    }

    // vehicles reaching an exit zone or leaving the bounds end here
    int remaining = 0;
    for (int i : live) {
      Agent & ag = agents[i];
      const VehicleState & s = ag.states.back();
      const Vec2 c{s.px, s.py};
      std::string reason;
      for (const Polygon & zone : scene.exit_zones) {
        if (point_in_polygon(zone, c)) reason = "exit_zone";
      }
      if (reason.empty() && !scene.bounds.contains(s.px, s.py)) reason = "out_of_bounds";
      if (reason.empty()) {
        ++remaining;
      } else {
        ag.live = false;
        log.exits.push_back({t + 1, i, reason});
      }
    }

    std::vector<SpawnRequest> fresh = spawn_arrivals(arrival_rng, rates, dt, scene);
    std::vector<SpawnRequest> next_retries;
    auto try_spawn = [&](const SpawnRequest & req, bool retry) {
      if (remaining >= scene.max_agents) {
        ++log.dropped_arrivals;
        return;
      }
      const VehicleDims reserved{req.dims.length + 2.0 * cfg.spawn_clearance, req.dims.width};
      if (overlaps_any(OrientedBox::of(req.pose, reserved), agents, t + 1)) {
        if (retry) {
          ++log.rejected_spawns;
        } else {
          next_retries.push_back(req);
        }
        return;
      }
      Agent ag;
      ag.dims = req.dims;
      ag.first = t + 1;
      ag.states.push_back(req.pose);
      log.arrivals.push_back({t + 1, static_cast<int>(agents.size()), req.zone});
      agents.push_back(std::move(ag));
      ++remaining;
    };
    for (const SpawnRequest & req : retries) try_spawn(req, true);
    for (const SpawnRequest & req : fresh) try_spawn(req, false);
    retries = std::move(next_retries);
  }

  log.joint = JointTrajectory(static_cast<int>(agents.size()), steps, dt);
  for (int i = 0; i < static_cast<int>(agents.size()); ++i) {
    const Agent & ag = agents[i];
    for (std::size_t k = 0; k < ag.states.size(); ++k) {
      log.joint.set_state(i, ag.first + static_cast<int>(k), ag.states[k]);
    }
    log.ids.push_back(i + 1);
    log.dims.push_back(ag.dims);
  }

  for (const Collision & c : detect_collisions(log.joint, log.dims)) {
    if (c.step > warm) log.collisions.push_back(c);
  }
  const GridSpec grid = grid_for(scene.bounds, scene.grid_cell);
  log.window_pets = window_pets(log.joint, log.dims, grid, scene.horizon_steps, warm);
  std::optional<double> min_pet;
  for (const WindowPet & w : log.window_pets) {
    if (w.pet && (!min_pet || *w.pet < *min_pet)) min_pet = w.pet;
  }
  log.realized_risk = risk_from_pet(PetResult{min_pet, {}, {}}, RiskParams{});
  return log;
}

void ExperimentConfig::validate(const SceneConfig & scene) const
{
  if (risks.empty()) throw ValidationError("risk grid is empty");
  for (double r : risks) {
    if (!(r >= 0.0 && r <= 1.0)) throw RangeError("risk grid values must lie in [0, 1]");
  }
  if (episodes_per_risk < 1) throw ValidationError("episodes per risk must be positive");
  if (seed_groups < 1) throw ValidationError("seed groups must be positive");
  if (workers < 1) throw ValidationError("workers must be positive");
  for (double r : risks) {
    EpisodeConfig e = episode;
    e.risk = RiskLevel::of(r);
    e.validate(scene);
  }
}

std::uint64_t episode_seed(std::uint64_t experiment_seed, std::size_t risk_index, int episode)
{
  return derive_seed(experiment_seed, {risk_index, static_cast<std::uint64_t>(episode)});
}

RiskLevelSummary summarize_level(
  double risk, std::span<const EpisodeLog> logs, int seed_groups, const SceneConfig & scene)
{
  RiskLevelSummary s;
  s.risk = risk;
  s.episodes = static_cast<int>(logs.size());
  const int groups = std::max(1, std::min(seed_groups, s.episodes));
  std::vector<int> g_eps(groups, 0), g_crash(groups, 0);
  for (std::size_t e = 0; e < logs.size(); ++e) {
    const EpisodeLog & log = logs[e];
    const int g = static_cast<int>(e % groups);
    ++g_eps[g];
    if (log.crashed()) {
      ++g_crash[g];
      ++s.crashes;
    }
    for (const WindowPet & w : log.window_pets) {
      ++s.windows;
      if (w.pet && *w.pet < 1.0) ++s.windows_pet_below_1s;
    }
    accumulate_metrics(log.joint, scene, log.warmup_steps, log.window_pets, s.metrics);
    s.seeds.push_back(log.seed);
  }
  if (s.episodes > 0) {
    double sum = 0.0;
    for (int g = 0; g < groups; ++g) {
      const double rate = static_cast<double>(g_crash[g]) / g_eps[g];
      s.group_crash_rates.push_back(rate);
      sum += rate;
    }
    s.crash_rate = sum / groups;
    s.crash_rate_min = *std::min_element(s.group_crash_rates.begin(), s.group_crash_rates.end());
    s.crash_rate_max = *std::max_element(s.group_crash_rates.begin(), s.group_crash_rates.end());
  }
  s.pet_below_1s = s.windows > 0 ? static_cast<double>(s.windows_pet_below_1s) / s.windows : 0.0;
  return s;
}

ExperimentReport run_experiment(
  const EpisodeContext & ctx, const ExperimentConfig & cfg, std::vector<EpisodeLog> * logs)
{
  cfg.validate(ctx.scene);
  const int per = cfg.episodes_per_risk;
  const int tasks = static_cast<int>(cfg.risks.size()) * per;
  std::vector<EpisodeLog> all(tasks);
  std::vector<std::exception_ptr> errors(tasks);

  auto run_task = [&](int task) {
    const std::size_t ri = static_cast<std::size_t>(task / per);
    EpisodeConfig e = cfg.episode;
    e.risk = RiskLevel::of(cfg.risks[ri]);
    e.seed = episode_seed(cfg.seed, ri, task % per);
    try {
      all[task] = run_episode(ctx, e);
    } catch (...) {
      errors[task] = std::current_exception();
    }
  };

  if (cfg.workers == 1) {
    for (int task = 0; task < tasks; ++task) run_task(task);
  } else {
#pragma omp parallel for num_threads(cfg.workers) schedule(dynamic, 1)
    for (int task = 0; task < tasks; ++task) run_task(task);
  }
  for (const auto & err : errors) {
    if (err) std::rethrow_exception(err);
  }

  ExperimentReport report;
  for (std::size_t ri = 0; ri < cfg.risks.size(); ++ri) {
    const std::span<const EpisodeLog> level(all.data() + ri * per, per);
    report.levels.push_back(summarize_level(cfg.risks[ri], level, cfg.seed_groups, ctx.scene));
    report.episodes += report.levels.back().episodes;
    report.crashes += report.levels.back().crashes;
  }
  if (logs) *logs = std::move(all);
  return report;
}

}  // namespace riskenv
