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

#include "riskenv/safety_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "riskenv/error.hpp"

namespace riskenv
{
namespace
{
VehicleDims dims_of(std::span<const VehicleDims> dims, int agent)
{
  return agent < static_cast<int>(dims.size()) ? dims[agent] : VehicleDims{};
}
}  // namespace

void RiskParams::validate() const
{
  if (!(k > 0.0)) throw ValidationError("risk k must be positive");
  if (!(t_norm > 0.0)) throw ValidationError("risk t_norm must be positive");
  if (!(sigma >= 0.0 && sigma < 1.0)) throw ValidationError("risk sigma must be in [0, 1)");
}

std::vector<OccupancyEvent> occupancy_intervals(
  const JointTrajectory & jt, std::span<const VehicleDims> dims, const GridSpec & g)
{
  std::vector<OccupancyEvent> events;
  const double dt = jt.dt();
  for (int i = 0; i < jt.agents(); ++i) {
    const VehicleDims d = dims_of(dims, i);
    // open[k] = (cell, step_enter), kept sorted by cell
    std::vector<std::pair<int, int>> open;
    auto close = [&](const std::pair<int, int> & o, int last_step) {
      events.push_back({o.first, i, o.second, last_step, o.second * dt, last_step * dt});
    };
    for (int t = 0; t < jt.steps(); ++t) {
      std::vector<int> cells;
      if (jt.present(i, t)) cells = rasterize_box(OrientedBox::of(jt.state(i, t), d), g);
      std::vector<std::pair<int, int>> next;
      next.reserve(cells.size());
      std::size_t k = 0;
      for (int c : cells) {
        while (k < open.size() && open[k].first < c) close(open[k++], t - 1);
        if (k < open.size() && open[k].first == c) {
          next.push_back(open[k++]);
        } else {
          next.emplace_back(c, t);
        }
      }
      while (k < open.size()) close(open[k++], t - 1);
      open = std::move(next);
    }
    for (const auto & o : open) close(o, jt.steps() - 1);
  }
  std::sort(events.begin(), events.end(), [](const OccupancyEvent & a, const OccupancyEvent & b) {
    if (a.cell != b.cell) return a.cell < b.cell;
    if (a.vehicle != b.vehicle) return a.vehicle < b.vehicle;
    return a.step_enter < b.step_enter;
  });
  return events;
}

PetResult scene_pet(std::span<const OccupancyEvent> events)
{
  std::vector<const OccupancyEvent *> sorted;
  sorted.reserve(events.size());
  for (const auto & e : events) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto * a, const auto * b) {
    return a->cell < b->cell;
  });

  PetResult best;
  std::size_t begin = 0;
  while (begin < sorted.size()) {
    std::size_t end = begin;
    while (end < sorted.size() && sorted[end]->cell == sorted[begin]->cell) ++end;
    for (std::size_t a = begin; a < end; ++a) {
      for (std::size_t b = a + 1; b < end; ++b) {
        const OccupancyEvent & ea = *sorted[a];
        const OccupancyEvent & eb = *sorted[b];
        if (ea.vehicle == eb.vehicle) continue;
        double pet = 0.0;
        if (eb.t_enter >= ea.t_exit) {
          pet = eb.t_enter - ea.t_exit;
        } else if (ea.t_enter >= eb.t_exit) {
          pet = ea.t_enter - eb.t_exit;
        }
        // a zero gap (enter == exit) is co-occupancy at the shared step
        if (eb.step_enter <= ea.step_exit && ea.step_enter <= eb.step_exit) pet = 0.0;
        if (!best.value || pet < *best.value) {
          best.value = pet;
          best.cell = ea.cell;
          best.pair = std::minmax(ea.vehicle, eb.vehicle);
        }
      }
    }
    begin = end;
  }
  return best;
}

double risk_from_pet(double pet, const RiskParams & p)
{
  return std::exp(-p.k * std::max(0.0, pet / p.t_norm - p.sigma));
}

double risk_from_pet(const PetResult & pet, const RiskParams & p)
{
  return risk_from_pet(pet.value.value_or(p.t_norm), p);
}

std::vector<Collision> detect_collisions(
  const JointTrajectory & jt, std::span<const VehicleDims> dims)
{
  std::vector<int> first(jt.agents(), -1);
  for (int i = 0; i < jt.agents(); ++i) {
    for (int t = 0; t < jt.steps(); ++t) {
      if (jt.present(i, t)) {
        first[i] = t;
        break;
      }
    }
  }
  std::vector<Collision> out;
  for (int t = 0; t < jt.steps(); ++t) {
    for (int i = 0; i < jt.agents(); ++i) {
      if (!jt.present(i, t) || (t > 0 && first[i] == t)) continue;
      const OrientedBox bi = OrientedBox::of(jt.state(i, t), dims_of(dims, i));
      for (int j = i + 1; j < jt.agents(); ++j) {
        if (!jt.present(j, t) || (t > 0 && first[j] == t)) continue;
        if (boxes_overlap(bi, OrientedBox::of(jt.state(j, t), dims_of(dims, j)))) {
          out.push_back({t, i, j});
        }
      }
    }
  }
  return out;
}

PetResult joint_pet(
  const JointTrajectory & jt, std::span<const VehicleDims> dims, const GridSpec & g)
{
  return scene_pet(occupancy_intervals(jt, dims, g));
}

std::vector<WindowPet> window_pets(
  const JointTrajectory & jt, std::span<const VehicleDims> dims, const GridSpec & g, int len,
  int first)
{
  std::vector<WindowPet> out;
  for (int t0 = std::max(0, first); t0 + len <= jt.steps(); ++t0) {
    out.push_back({t0, joint_pet(slice_window(jt, t0, len), dims, g).value});
  }
  return out;
}

}  // namespace riskenv
