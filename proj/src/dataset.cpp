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

#include "riskenv/dataset.hpp"

#include "riskenv/error.hpp"
#include "riskenv/geometry.hpp"

namespace riskenv
{

JointTrajectory recording_window(
  const Recording & rec, const JointTrajectory & full, int t0, int len, int max_agents,
  std::vector<VehicleDims> * dims)
{
  if (t0 < 0 || len < 1 || t0 + len > full.steps()) throw RangeError("window out of range");
  JointTrajectory w(max_agents, len, full.dt());
  if (dims) dims->assign(max_agents, VehicleDims{});
  int slot = 0;
  for (int i = 0; i < full.agents() && slot < max_agents; ++i) {
    bool any = false;
    for (int t = t0; t < t0 + len && !any; ++t) any = full.present(i, t);
    if (!any) continue;
    for (int t = 0; t < len; ++t) {
      if (full.present(i, t0 + t)) w.set_state(slot, t, full.state(i, t0 + t));
    }
    if (dims) (*dims)[slot] = rec.tracks[i].dims;
    ++slot;
  }
  return w;
}

std::vector<WindowLabel> label_dataset(
  std::span<const Recording> recordings, const SceneConfig & scene, const RiskParams & params)
{
  scene.validate();
  params.validate();
  const GridSpec grid = grid_for(scene.bounds, scene.grid_cell);
  const int len = scene.horizon_steps;
  std::vector<WindowLabel> out;
  for (std::size_t r = 0; r < recordings.size(); ++r) {
    const Recording & rec = recordings[r];
    if (std::abs(rec.dt - scene.dt) > 1e-9) {
      throw ValidationError("recording dt does not match the scene dt");
    }
    if (rec.tracks.empty()) continue;
    const JointTrajectory full = to_joint(rec);
    std::vector<VehicleDims> dims;
    for (int t0 = 0; t0 + len <= full.steps(); ++t0) {
      WindowLabel wl;
      wl.recording = static_cast<int>(r);
      wl.t0 = t0;
      wl.window = recording_window(rec, full, t0, len, scene.max_agents, &dims);
      const PetResult pet = joint_pet(wl.window, dims, grid);
      wl.pet = pet.value;
      wl.risk = risk_from_pet(pet, params);
      out.push_back(std::move(wl));
    }
  }
  return out;
}

std::vector<LabeledWindow> training_windows(
  std::span<const WindowLabel> labels, const Normalizer & norm)
{
  std::vector<LabeledWindow> out;
  out.reserve(labels.size());
  for (const WindowLabel & wl : labels) {
    LabeledWindow lw{wl.window, wl.risk};
    norm.normalize(lw.window);
    out.push_back(std::move(lw));
  }
  return out;
}

}  // namespace riskenv
