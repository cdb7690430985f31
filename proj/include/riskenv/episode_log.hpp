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

#ifndef RISKENV_EPISODE_LOG_HPP_
#define RISKENV_EPISODE_LOG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "riskenv/safety_metrics.hpp"
#include "riskenv/scene.hpp"

namespace riskenv
{

struct ArrivalEvent
{
  int step = 0;
  int agent = 0;
  int zone = -1;  // -1: vehicle came from the initialization clip

  bool operator==(const ArrivalEvent & other) const = default;
};

struct ExitEvent
{
  int step = 0;  // last step the agent is present
  int agent = 0;
  std::string reason;  // "exit_zone", "out_of_bounds" or "clip"

  bool operator==(const ExitEvent & other) const = default;
};

/// Full record of one closed-loop episode.
struct EpisodeLog
{
  JointTrajectory joint;
  std::vector<int> ids;
  std::vector<VehicleDims> dims;
  std::vector<ArrivalEvent> arrivals;
  std::vector<ExitEvent> exits;
  std::vector<Collision> collisions;  // generated phase only
  std::vector<WindowPet> window_pets;
  double realized_risk = 0.0;
  int warmup_steps = 0;
  int dropped_arrivals = 0;
  int rejected_spawns = 0;

  // configuration echo
  std::uint64_t seed = 0;
  double risk = -1.0;  // -1 for the unconditional marker
  double volume_multiplier = 1.0;
  std::vector<double> arrival_rates;
  double duration = 0.0;
  double init_clip = 0.0;
  int clip_recording = -1;
  int clip_frame = 0;

  bool crashed() const { return !collisions.empty(); }
};

}  // namespace riskenv

#endif  // RISKENV_EPISODE_LOG_HPP_
