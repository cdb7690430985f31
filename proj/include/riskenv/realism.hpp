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

#ifndef RISKENV_REALISM_HPP_
#define RISKENV_REALISM_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskenv/episode_log.hpp"
#include "riskenv/scene.hpp"

namespace riskenv
{

/// Fixed-edge histogram. Out-of-range values are clamped into the edge bins.
struct Histogram
{
  std::vector<double> edges;
  std::vector<std::int64_t> counts;

  static Histogram uniform(double lo, double hi, double width);

  void add(double v);
  void merge(const Histogram & other);
  std::int64_t total() const;
  std::vector<double> density() const;

  bool operator==(const Histogram & other) const = default;
};

/// 1-Wasserstein distance between two histograms with identical edges, using
/// bin-wise CDF differences. Empty when either histogram has no samples.
std::optional<double> wasserstein1(const Histogram & a, const Histogram & b);

struct MetricHistograms
{
  Histogram distance = Histogram::uniform(0.0, 50.0, 1.0);
  Histogram speed = Histogram::uniform(0.0, 15.0, 0.5);
  Histogram yield_distance = Histogram::uniform(0.0, 50.0, 1.0);
  Histogram yield_speed = Histogram::uniform(0.0, 15.0, 0.5);
  Histogram pet = Histogram::uniform(0.0, 3.2, 0.2);

  static constexpr std::array<const char *, 5> kNames{
    "distance", "speed", "yield_distance", "yield_speed", "pet"};

  std::array<const Histogram *, 5> all() const;
  std::array<Histogram *, 5> all();
  void merge(const MetricHistograms & other);

  bool operator==(const MetricHistograms & other) const = default;
};

/// Yielding thresholds.
inline constexpr double kYieldSpeed = 0.5;
inline constexpr double kYieldRange = 25.0;

/// Accumulates distance, speed and yielding samples from steps >= first_step,
/// plus the present PET values of `windows`.
void accumulate_metrics(
  const JointTrajectory & jt, const SceneConfig & scene, int first_step,
  std::span<const WindowPet> windows, MetricHistograms & out);

/// Metrics of an entire recording (reference data).
MetricHistograms recording_metrics(const Recording & rec, const SceneConfig & scene);

struct RealismReport
{
  MetricHistograms produced;
  std::array<std::optional<double>, 5> wasserstein{};
  int episodes = 0;
  int crashes = 0;
  double crash_rate = 0.0;
};

RealismReport realism_report(
  std::span<const EpisodeLog> logs, const MetricHistograms & reference, const SceneConfig & scene);

}  // namespace riskenv

#endif  // RISKENV_REALISM_HPP_
