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

#ifndef RISKENV_CLOSED_LOOP_HPP_
#define RISKENV_CLOSED_LOOP_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "riskenv/diffusion.hpp"
#include "riskenv/episode_log.hpp"
#include "riskenv/motion_vocab.hpp"
#include "riskenv/realism.hpp"
#include "riskenv/scene.hpp"

namespace riskenv
{

enum class VolumeMode { kConsistent, kRiskScaled };

VolumeMode parse_volume_mode(const std::string & s);
std::string to_string(VolumeMode m);

/// Arrival-rate scale: 1 when consistent, 0.5 at r = 0.3 rising linearly to
/// 1.5 at r = 1.0 when risk-scaled.
double volume_multiplier(double r, VolumeMode mode);

struct SpawnRequest
{
  int zone = 0;
  VehicleState pose;
  VehicleDims dims;
};

/// Poisson(rate * dt) spawns per entry zone, in zone order.
std::vector<SpawnRequest> spawn_arrivals(
  std::mt19937_64 & rng, std::span<const double> rates, double dt, const SceneConfig & scene);

struct EpisodeConfig
{
  double duration = 30.0;
  double init_clip = 2.0;
  RiskLevel risk = RiskLevel::of(0.5);
  std::vector<double> arrival_rates;  // per entry zone, before volume scaling
  VolumeMode volume_mode = VolumeMode::kConsistent;
  /// Free length required ahead of and behind a new vehicle, meters.
  double spawn_clearance = 8.0;
  std::uint64_t seed = 0;

  void validate(const SceneConfig & scene) const;
};

/// Read-only inputs shared by every episode.
struct EpisodeContext
{
  const NoisePredictor & predictor;
  const Vocabulary & vocab;
  const SceneConfig & scene;
  const NoiseSchedule & schedule;
  const Normalizer & normalizer;
  SamplerConfig sampler;
  /// Sources of initialization clips; none means the episode starts empty.
  std::span<const Recording> clips;
};

/// One closed-loop rollout. Warmup steps replay a clip, after which every
/// step samples a joint future, snaps it onto the vocabulary, executes its
/// first transition, spawns arrivals and removes exiting vehicles.
EpisodeLog run_episode(const EpisodeContext & ctx, const EpisodeConfig & cfg);

struct ExperimentConfig
{
  std::vector<double> risks{0.3, 0.65, 1.0};
  int episodes_per_risk = 50;
  int seed_groups = 5;
  std::uint64_t seed = 0;
  EpisodeConfig episode;  // risk and seed are overwritten per episode
  int workers = 1;

  void validate(const SceneConfig & scene) const;
};

/// Stream seed of episode e at risk index i.
std::uint64_t episode_seed(std::uint64_t experiment_seed, std::size_t risk_index, int episode);

struct RiskLevelSummary
{
  double risk = 0.0;
  int episodes = 0;
  int crashes = 0;
  double crash_rate = 0.0;  // mean over seed groups
  double crash_rate_min = 0.0;
  double crash_rate_max = 0.0;
  std::vector<double> group_crash_rates;
  std::int64_t windows = 0;
  std::int64_t windows_pet_below_1s = 0;
  double pet_below_1s = 0.0;  // fraction of all generated-phase windows
  MetricHistograms metrics;
  std::vector<std::uint64_t> seeds;
};

struct ExperimentReport
{
  std::vector<RiskLevelSummary> levels;
  int episodes = 0;
  int crashes = 0;
};

/// Summary of a set of episode logs of one risk level.
RiskLevelSummary summarize_level(
  double risk, std::span<const EpisodeLog> logs, int seed_groups, const SceneConfig & scene);

/// Runs every (risk, episode) pair on up to cfg.workers threads. Logs come
/// back in (risk, episode) order and the report does not depend on workers.
ExperimentReport run_experiment(
  const EpisodeContext & ctx, const ExperimentConfig & cfg,
  std::vector<EpisodeLog> * logs = nullptr);

}  // namespace riskenv

#endif  // RISKENV_CLOSED_LOOP_HPP_
