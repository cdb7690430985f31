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

#ifndef RISKENV_GEOMETRY_HPP_
#define RISKENV_GEOMETRY_HPP_

#include <array>
#include <vector>

#include "riskenv/scene.hpp"

namespace riskenv
{

struct OrientedBox
{
  Vec2 center;
  double heading = 0.0;
  VehicleDims dims;

  static OrientedBox of(const VehicleState & s, const VehicleDims & dims);
};

/// Corners in world frame ordered front-left, front-right, rear-right, rear-left.
std::array<Vec2, 4> box_corners(const OrientedBox & b);

/// Separating-axis test over the four face normals. Touching counts as overlap.
bool boxes_overlap(const OrientedBox & a, const OrientedBox & b);

bool point_in_box(const OrientedBox & b, Vec2 p);

/// Point-in-convex-polygon test; boundary points count as inside.
bool point_in_polygon(const Polygon & poly, Vec2 p);

struct GridSpec
{
  Vec2 origin;
  double cell = 0.5;
  int nx = 1;
  int ny = 1;

  int linear(int ix, int iy) const { return iy * nx + ix; }
  void validate() const;
};

/// Linear indices (ascending) of every cell whose square shares positive area
/// with the box. Cells outside the grid are dropped.
std::vector<int> rasterize_box(const OrientedBox & b, const GridSpec & g);

/// Grid covering a scene rectangle at the given cell size.
GridSpec grid_for(const Rect & bounds, double cell);

/// Ego-frame transition over one time step.
struct MotionToken
{
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;

  bool operator==(const MotionToken & other) const = default;
};

/// Reference box used for token matching.
inline constexpr VehicleDims kTokenBox{3.6, 1.8};

/// Corners of the reference box posed at the token's resulting relative pose.
std::array<Vec2, 4> token_corners(const MotionToken & a, const VehicleDims & box = kTokenBox);

/// Mean distance between corresponding corners of the reference box posed
/// under each token.
double corner_distance(
  const MotionToken & a, const MotionToken & b, const VehicleDims & box = kTokenBox);

}  // namespace riskenv

#endif  // RISKENV_GEOMETRY_HPP_
