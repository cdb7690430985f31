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

#include "riskenv/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "riskenv/error.hpp"

namespace riskenv
{

VehicleState::VehicleState(double x, double y, double c, double s) : px(x), py(y)
{
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(c) || !std::isfinite(s)) {
    throw ValidationError("vehicle state has non-finite component");
  }
  const double norm = std::hypot(c, s);
  if (norm < 1e-12) {
    throw ValidationError("vehicle state heading vector has zero norm");
  }
  cos_h = c / norm;
  sin_h = s / norm;
}

VehicleState VehicleState::from_heading(double x, double y, double theta)
{
  const auto [c, s] = heading_to_vec(theta);
  return VehicleState(x, y, c, s);
}

double VehicleState::heading() const { return vec_to_heading(cos_h, sin_h); }

std::pair<double, double> heading_to_vec(double theta)
{
  if (!std::isfinite(theta)) {
    throw ValidationError("heading is not finite");
  }
  return {std::cos(theta), std::sin(theta)};
}

double vec_to_heading(double cos_h, double sin_h) { return std::atan2(sin_h, cos_h); }

JointTrajectory::JointTrajectory(int agents, int steps, double dt)
: agents_(agents), steps_(steps), dt_(dt)
{
  if (agents < 0 || steps < 0) {
    throw RangeError("joint trajectory dimensions must be non-negative");
  }
  data_.assign(static_cast<std::size_t>(agents) * steps * kStateDim, 0.0);
  mask_.assign(static_cast<std::size_t>(agents) * steps, 0);
}

void JointTrajectory::set_present(int agent, int step, bool present)
{
  mask_[static_cast<std::size_t>(agent) * steps_ + step] = present ? 1 : 0;
}

VehicleState JointTrajectory::state(int agent, int step) const
{
  const std::size_t i = index(agent, step);
  VehicleState s;
  s.px = data_[i];
  s.py = data_[i + 1];
  s.cos_h = data_[i + 2];
  s.sin_h = data_[i + 3];
  return s;
}

void JointTrajectory::set_state(int agent, int step, const VehicleState & s)
{
  const std::size_t i = index(agent, step);
  data_[i] = s.px;
  data_[i + 1] = s.py;
  data_[i + 2] = s.cos_h;
  data_[i + 3] = s.sin_h;
  set_present(agent, step, true);
}

bool JointTrajectory::agent_present(int agent) const
{
  for (int t = 0; t < steps_; ++t) {
    if (present(agent, t)) return true;
  }
  return false;
}

void JointTrajectory::zero_masked_out()
{
  for (int i = 0; i < agents_; ++i) {
    for (int t = 0; t < steps_; ++t) {
      if (!present(i, t)) {
        for (int d = 0; d < kStateDim; ++d) at(i, t, d) = 0.0;
      }
    }
  }
}

std::vector<Violation> validate_joint(const JointTrajectory & jt)
{
  std::vector<Violation> out;
  for (int i = 0; i < jt.agents(); ++i) {
    int first = -1;
    int last = -1;
    for (int t = 0; t < jt.steps(); ++t) {
      if (!jt.present(i, t)) continue;
      if (first < 0) first = t;
      last = t;
      bool finite = true;
      for (int d = 0; d < kStateDim; ++d) finite = finite && std::isfinite(jt.at(i, t, d));
      if (!finite) {
        out.push_back({i, t, "finite"});
        continue;
      }
      const double n2 = jt.at(i, t, 2) * jt.at(i, t, 2) + jt.at(i, t, 3) * jt.at(i, t, 3);
      if (std::abs(n2 - 1.0) > 1e-6) out.push_back({i, t, "unit-norm"});
    }
    // one violation per gap, reported at the first absent step
    for (int t = first + 1; first >= 0 && t < last; ++t) {
      if (!jt.present(i, t) && jt.present(i, t - 1)) out.push_back({i, t, "contiguity"});
    }
  }
  return out;
}

JointTrajectory slice_window(const JointTrajectory & jt, int t0, int len)
{
  if (t0 < 0 || len < 0 || t0 + len > jt.steps()) {
    throw RangeError(
      "window [" + std::to_string(t0) + ", " + std::to_string(t0 + len) + ") exceeds " +
      std::to_string(jt.steps()) + " steps");
  }
  JointTrajectory out(jt.agents(), len, jt.dt());
  for (int i = 0; i < jt.agents(); ++i) {
    for (int t = 0; t < len; ++t) {
      out.set_present(i, t, jt.present(i, t0 + t));
      for (int d = 0; d < kStateDim; ++d) out.at(i, t, d) = jt.at(i, t0 + t, d);
    }
  }
  return out;
}

bool RingRegion::contains(double x, double y) const
{
  const double r = std::hypot(x - center.x, y - center.y);
  return r >= inner_radius && r <= outer_radius;
}

void SceneConfig::validate() const
{
  if (!(dt > 0.0)) throw ValidationError("scene dt must be positive");
  if (horizon_steps < 2) throw ValidationError("horizon_steps must be at least 2");
  if (max_agents < 1) throw ValidationError("max_agents must be at least 1");
  if (!(grid_cell > 0.0)) throw ValidationError("grid_cell must be positive");
  if (!(default_dims.length > 0.0) || !(default_dims.width > 0.0)) {
    throw ValidationError("vehicle dims must be positive");
  }
  if (!(bounds.max_x > bounds.min_x) || !(bounds.max_y > bounds.min_y)) {
    throw ValidationError("scene bounds are empty");
  }
}

RiskLevel RiskLevel::of(double value)
{
  if (!(value >= 0.0 && value <= 1.0)) {
    throw RangeError("risk level " + std::to_string(value) + " outside [0, 1]");
  }
  RiskLevel r;
  r.value_ = value;
  return r;
}

double RiskLevel::value() const
{
  if (!value_) throw RangeError("unconditional risk level has no value");
  return *value_;
}

int Recording::first_frame() const
{
  int f = std::numeric_limits<int>::max();
  for (const auto & tr : tracks) f = std::min(f, tr.first_frame);
  return tracks.empty() ? 0 : f;
}

int Recording::last_frame() const
{
  int f = std::numeric_limits<int>::min();
  for (const auto & tr : tracks) f = std::max(f, tr.last_frame());
  return tracks.empty() ? -1 : f;
}

JointTrajectory to_joint(const Recording & rec)
{
  const int f0 = rec.first_frame();
  const int steps = rec.tracks.empty() ? 0 : rec.last_frame() - f0 + 1;
  JointTrajectory jt(static_cast<int>(rec.tracks.size()), steps, rec.dt);
  for (std::size_t i = 0; i < rec.tracks.size(); ++i) {
    const Track & tr = rec.tracks[i];
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      jt.set_state(static_cast<int>(i), tr.first_frame - f0 + static_cast<int>(k), tr.states[k]);
    }
  }
  return jt;
}

Recording from_joint(
  const JointTrajectory & jt, std::span<const int> ids, std::span<const VehicleDims> dims,
  int frame0)
{
  Recording rec;
  rec.dt = jt.dt();
  for (int i = 0; i < jt.agents(); ++i) {
    Track tr;
    tr.id = i < static_cast<int>(ids.size()) ? ids[i] : i;
    tr.dims = i < static_cast<int>(dims.size()) ? dims[i] : VehicleDims{};
    int first = -1;
    for (int t = 0; t < jt.steps(); ++t) {
      if (!jt.present(i, t)) {
        if (first >= 0) break;
        continue;
      }
      if (first < 0) first = t;
      tr.states.push_back(jt.state(i, t));
    }
    if (first < 0) continue;
    tr.first_frame = frame0 + first;
    rec.tracks.push_back(std::move(tr));
  }
  return rec;
}

}  // namespace riskenv
