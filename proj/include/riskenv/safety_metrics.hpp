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

#ifndef RISKENV_SAFETY_METRICS_HPP_
#define RISKENV_SAFETY_METRICS_HPP_

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "riskenv/geometry.hpp"
#include "riskenv/scene.hpp"

namespace riskenv
{

/// Maximal contiguous occupancy of one grid cell by one vehicle.
struct OccupancyEvent
{
  int cell = 0;
  int vehicle = 0;
  int step_enter = 0;
  int step_exit = 0;
  double t_enter = 0.0;
  double t_exit = 0.0;

  bool operator==(const OccupancyEvent & other) const = default;
};

struct PetResult
{
  std::optional<double> value;
  std::optional<int> cell;
  std::optional<std::pair<int, int>> pair;
};

struct RiskParams
{
  double k = 5.0;
  double sigma = 0.05;
  double t_norm = 3.2;

  void validate() const;
};

struct Collision
{
  int step = 0;
  int i = 0;
  int j = 0;

  bool operator==(const Collision & other) const = default;
};

/// Events sorted by (cell, vehicle, step_enter). `dims` is indexed by agent;
/// an empty span means default dims for everyone.
std::vector<OccupancyEvent> occupancy_intervals(
  const JointTrajectory & jt, std::span<const VehicleDims> dims, const GridSpec & g);

/// Minimum post-encroachment time over all cells and pairs of distinct
/// vehicles. Temporal co-occupancy of a cell yields 0.
PetResult scene_pet(std::span<const OccupancyEvent> events);

/// exp(-k * max(0, pet / t_norm - sigma)).
double risk_from_pet(double pet, const RiskParams & p);
/// A missing PET is treated as t_norm.
double risk_from_pet(const PetResult & pet, const RiskParams & p);

/// Every (step, i < j) with overlapping boxes among present agents. A pair is
/// skipped on the step where either agent first appears (unless that is step 0).
std::vector<Collision> detect_collisions(
  const JointTrajectory & jt, std::span<const VehicleDims> dims);

/// Scene PET of a joint trajectory over the given grid.
PetResult joint_pet(
  const JointTrajectory & jt, std::span<const VehicleDims> dims, const GridSpec & g);

struct WindowPet
{
  int t0 = 0;
  std::optional<double> pet;
};

/// PET of every length-`len` window starting at t0 in [first, steps - len].
std::vector<WindowPet> window_pets(
  const JointTrajectory & jt, std::span<const VehicleDims> dims, const GridSpec & g, int len,
  int first = 0);

}  // namespace riskenv

#endif  // RISKENV_SAFETY_METRICS_HPP_
