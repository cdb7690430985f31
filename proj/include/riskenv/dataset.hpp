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

#ifndef RISKENV_DATASET_HPP_
#define RISKENV_DATASET_HPP_

#include <optional>
#include <span>
#include <vector>

#include "riskenv/safety_metrics.hpp"
#include "riskenv/scene.hpp"
#include "riskenv/toy_predictor.hpp"

namespace riskenv
{

/// One training window cut from a recording, with its risk label.
struct WindowLabel
{
  int recording = 0;
  int t0 = 0;  // offset from the recording's first frame
  std::optional<double> pet;
  double risk = 0.0;
  JointTrajectory window;
};

/// Window of `len` steps at t0: the agents present anywhere in it, in track
/// order, capped at max_agents and padded to max_agents slots.
JointTrajectory recording_window(
  const Recording & rec, const JointTrajectory & full, int t0, int len, int max_agents,
  std::vector<VehicleDims> * dims = nullptr);

/// Slides a horizon-length window over every recording and labels each with
/// the risk of its scene PET.
std::vector<WindowLabel> label_dataset(
  std::span<const Recording> recordings, const SceneConfig & scene, const RiskParams & params);

/// Windows mapped into model space, ready for training.
std::vector<LabeledWindow> training_windows(
  std::span<const WindowLabel> labels, const Normalizer & norm);

}  // namespace riskenv

#endif  // RISKENV_DATASET_HPP_
