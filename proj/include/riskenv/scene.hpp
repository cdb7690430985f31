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

#ifndef RISKENV_SCENE_HPP_
#define RISKENV_SCENE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace riskenv
{

inline constexpr int kStateDim = 4;

/// Vehicle pose encoded as [px, py, cos(heading), sin(heading)].
/// The heading vector is renormalized on construction.
struct VehicleState
{
  double px = 0.0;
  double py = 0.0;
  double cos_h = 1.0;
  double sin_h = 0.0;

  VehicleState() = default;
  VehicleState(double x, double y, double c, double s);

  static VehicleState from_heading(double x, double y, double theta);
  double heading() const;
};

struct VehicleDims
{
  double length = 3.6;
  double width = 1.8;
};

std::pair<double, double> heading_to_vec(double theta);
double vec_to_heading(double cos_h, double sin_h);

struct Trajectory
{
  std::vector<VehicleState> states;
  double dt = 0.4;
};

/// Agent-by-time state tensor (agents x steps x 4) with a presence mask.
/// Masked-out entries hold zeros. The same container carries noisy diffusion
/// iterates, where the unit-heading invariant does not apply.
class JointTrajectory
{
public:
  JointTrajectory() = default;
  JointTrajectory(int agents, int steps, double dt);

  int agents() const { return agents_; }
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int agent, int step, int dim = 0) const
  {
    return (static_cast<std::size_t>(agent) * steps_ + step) * kStateDim + dim;
  }

  double & at(int agent, int step, int dim) { return data_[index(agent, step, dim)]; }
  double at(int agent, int step, int dim) const { return data_[index(agent, step, dim)]; }

  bool present(int agent, int step) const
  {
    return mask_[static_cast<std::size_t>(agent) * steps_ + step] != 0;
  }
  void set_present(int agent, int step, bool present);

  VehicleState state(int agent, int step) const;
  /// Writes the state and marks the entry present.
  void set_state(int agent, int step, const VehicleState & s);

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<const std::uint8_t> mask() const { return mask_; }

  bool same_shape(const JointTrajectory & other) const
  {
    return agents_ == other.agents_ && steps_ == other.steps_;
  }
  /// True when any step of the agent is present.
  bool agent_present(int agent) const;
  /// Zero every masked-out entry.
  void zero_masked_out();

  bool operator==(const JointTrajectory & other) const = default;

private:
  int agents_ = 0;
  int steps_ = 0;
  double dt_ = 0.4;
  std::vector<double> data_;
  std::vector<std::uint8_t> mask_;
};

struct Violation
{
  int agent;
  int step;
  std::string rule;
};

std::vector<Violation> validate_joint(const JointTrajectory & jt);

JointTrajectory slice_window(const JointTrajectory & jt, int t0, int len);

struct Vec2
{
  double x = 0.0;
  double y = 0.0;
};

using Polygon = std::vector<Vec2>;

struct Rect
{
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(double x, double y) const
  {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
};

struct EntryZone
{
  VehicleState pose;  // spawn pose, heading points into the scene
  Polygon region;     // approach area used for yielding statistics
};

/// Annulus standing in for the circulating roadway.
struct RingRegion
{
  Vec2 center;
  double inner_radius = 0.0;
  double outer_radius = 0.0;

  bool contains(double x, double y) const;
};

struct SceneConfig
{
  double dt = 0.4;
  int horizon_steps = 8;
  int max_agents = 12;
  std::vector<EntryZone> entry_zones;
  std::vector<Polygon> exit_zones;
  VehicleDims default_dims;
  double grid_cell = 0.5;
  Rect bounds{-80.0, -80.0, 80.0, 80.0};
  RingRegion circulating;

  void validate() const;
};

/// Desired risk in [0, 1], or the unconditional marker.
class RiskLevel
{
public:
  static RiskLevel unconditional() { return RiskLevel(); }
  static RiskLevel of(double value);

  bool is_unconditional() const { return !value_.has_value(); }
  double value() const;

  bool operator==(const RiskLevel & other) const = default;

private:
  RiskLevel() = default;
  std::optional<double> value_;
};

/// One recorded vehicle: contiguous states starting at first_frame.
struct Track
{
  int id = 0;
  int first_frame = 0;
  VehicleDims dims;
  std::vector<VehicleState> states;

  int last_frame() const { return first_frame + static_cast<int>(states.size()) - 1; }
};

/// A multi-vehicle recording at a fixed frame period.
struct Recording
{
  double dt = 0.4;
  std::vector<Track> tracks;

  int first_frame() const;
  int last_frame() const;
};

/// Joint tensor of a recording over [first_frame, last_frame]; agents in
/// track order.
JointTrajectory to_joint(const Recording & rec);

/// Inverse of to_joint for logs; frames start at frame0.
Recording from_joint(
  const JointTrajectory & jt, std::span<const int> ids, std::span<const VehicleDims> dims,
  int frame0 = 0);

}  // namespace riskenv

#endif  // RISKENV_SCENE_HPP_
