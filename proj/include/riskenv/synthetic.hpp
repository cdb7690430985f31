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

#ifndef RISKENV_SYNTHETIC_HPP_
#define RISKENV_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include "riskenv/scene.hpp"

namespace riskenv
{

/// Scripted roundabout traffic used as the bundled data source.
///
/// Arms point outward at equal angles; traffic keeps right and circulates
/// counter-clockwise. Vehicles follow fixed paths (approach, entry curve,
/// ring arc, exit curve, departure) with IDM car following, and wait at the
/// yield line until the gap to circulating traffic exceeds the driver's
/// gap-acceptance threshold. Lower thresholds also mean shorter headways and
/// higher desired speeds.
struct SyntheticWorldParams
{
  double ring_radius = 20.0;
  int arms = 4;
  double lane_offset = 3.0;       // lateral offset of inbound/outbound lanes
  double yield_distance = 26.0;   // center to yield line
  double spawn_distance = 65.0;   // center to spawn point
  double exit_distance = 72.0;    // center to end of the departure lane
  double nominal_speed = 9.0;     // approach and departure, m/s
  double ring_speed = 7.0;        // circulating, m/s
  double gap_threshold = 2.0;     // seconds
  double arrival_rate = 0.08;     // vehicles per second per arm
  double lateral_noise = 0.15;    // stationary std of lateral offset, m
  double heading_noise = 0.02;    // stationary std of heading jitter, rad
  double speed_spread = 0.1;      // relative spread of desired speeds
  double duration = 300.0;        // recorded seconds
  double warmup = 60.0;           // unrecorded lead-in
  double dt = 0.4;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Entry zones (spawn poses and approach regions), exit zones, circulating
/// ring and bounds of the world described by `p`.
SceneConfig roundabout_scene(const SyntheticWorldParams & p);

/// One recording of the scripted world. Deterministic given p.seed.
Recording gen_synthetic(const SyntheticWorldParams & p);

/// Gap thresholds spanned by the bundled training set.
inline const std::vector<double> kDatasetThresholds{0.2, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0};

/// One recording per threshold, each with its own derived seed.
std::vector<Recording> gen_synthetic_dataset(
  const SyntheticWorldParams & base, const std::vector<double> & thresholds);

}  // namespace riskenv

#endif  // RISKENV_SYNTHETIC_HPP_
