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

#include "riskenv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "riskenv/error.hpp"

namespace riskenv
{
namespace
{
// Positive-area tolerance for cell rasterization.
constexpr double kAreaEps = 1e-9;

struct Interval
{
  double lo;
  double hi;
};

Interval project(const std::array<Vec2, 4> & pts, Vec2 axis)
{
  Interval iv{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Vec2 & p : pts) {
    const double v = p.x * axis.x + p.y * axis.y;
    iv.lo = std::min(iv.lo, v);
    iv.hi = std::max(iv.hi, v);
  }
  return iv;
}

// Separating-axis test on two convex quads; touching counts as intersecting.
bool quads_intersect(const std::array<Vec2, 4> & a, const std::array<Vec2, 4> & b)
{
  const std::array<const std::array<Vec2, 4> *, 2> quads{&a, &b};
  for (const auto * q : quads) {
    for (int e = 0; e < 2; ++e) {
      const Vec2 p0 = (*q)[e];
      const Vec2 p1 = (*q)[e + 1];
      const Vec2 axis{-(p1.y - p0.y), p1.x - p0.x};
      const Interval ia = project(a, axis);
      const Interval ib = project(b, axis);
      if (ia.hi < ib.lo || ib.hi < ia.lo) return false;
    }
  }
  return true;
}

// Area of a convex quad clipped to an axis-aligned rectangle.
double clipped_area(const std::array<Vec2, 4> & quad, double x0, double y0, double x1, double y1)
{
  std::vector<Vec2> poly(quad.begin(), quad.end());
  std::vector<Vec2> next;
  auto clip = [&](auto inside, auto cut) {
    next.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 a = poly[i];
      const Vec2 b = poly[(i + 1) % poly.size()];
      const bool ia = inside(a);
      if (ia) next.push_back(a);
      if (ia != inside(b)) next.push_back(cut(a, b));
    }
    poly.swap(next);
  };
  auto cut_x = [](double x) {
    return [x](Vec2 a, Vec2 b) { return Vec2{x, a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)}; };
  };
  auto cut_y = [](double y) {
    return [y](Vec2 a, Vec2 b) { return Vec2{a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y), y}; };
  };
  clip([&](Vec2 p) { return p.x >= x0; }, cut_x(x0));
  clip([&](Vec2 p) { return p.x <= x1; }, cut_x(x1));
  clip([&](Vec2 p) { return p.y >= y0; }, cut_y(y0));
  clip([&](Vec2 p) { return p.y <= y1; }, cut_y(y1));
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(twice);
}

}  // namespace

OrientedBox OrientedBox::of(const VehicleState & s, const VehicleDims & dims)
{
  return OrientedBox{{s.px, s.py}, s.heading(), dims};
}

std::array<Vec2, 4> box_corners(const OrientedBox & b)
{
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  const double hl = 0.5 * b.dims.length;
  const double hw = 0.5 * b.dims.width;
  const std::array<Vec2, 4> local{{{hl, hw}, {hl, -hw}, {-hl, -hw}, {-hl, hw}}};
  std::array<Vec2, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {b.center.x + c * local[i].x - s * local[i].y,
              b.center.y + s * local[i].x + c * local[i].y};
  }
  return out;
}

bool boxes_overlap(const OrientedBox & a, const OrientedBox & b)
{
  return quads_intersect(box_corners(a), box_corners(b));
}

bool point_in_box(const OrientedBox & b, Vec2 p)
{
  const double c = std::cos(b.heading);
  const double s = std::sin(b.heading);
  const double rx = p.x - b.center.x;
  const double ry = p.y - b.center.y;
  const double lon = c * rx + s * ry;
  const double lat = -s * rx + c * ry;
  return std::abs(lon) <= 0.5 * b.dims.length && std::abs(lat) <= 0.5 * b.dims.width;
}

bool point_in_polygon(const Polygon & poly, Vec2 p)
{
  if (poly.size() < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (cross == 0.0) continue;
    const int s = cross > 0.0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return true;
}

void GridSpec::validate() const
{
  if (!(cell > 0.0)) throw ValidationError("grid cell must be positive");
  if (nx < 1 || ny < 1) throw ValidationError("grid must have at least one cell per axis");
}

std::vector<int> rasterize_box(const OrientedBox & b, const GridSpec & g)
{
  const auto corners = box_corners(b);
  double lo_x = corners[0].x, hi_x = corners[0].x, lo_y = corners[0].y, hi_y = corners[0].y;
  for (const Vec2 & p : corners) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const int ix0 = std::max(0, static_cast<int>(std::floor((lo_x - g.origin.x) / g.cell)));
  const int ix1 = std::min(g.nx - 1, static_cast<int>(std::floor((hi_x - g.origin.x) / g.cell)));
  const int iy0 = std::max(0, static_cast<int>(std::floor((lo_y - g.origin.y) / g.cell)));
  const int iy1 = std::min(g.ny - 1, static_cast<int>(std::floor((hi_y - g.origin.y) / g.cell)));

  std::vector<int> cells;
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double x0 = g.origin.x + ix * g.cell;
      const double y0 = g.origin.y + iy * g.cell;
      const std::array<Vec2, 4> square{
        {{x0 + g.cell, y0 + g.cell}, {x0 + g.cell, y0}, {x0, y0}, {x0, y0 + g.cell}}};
      if (!quads_intersect(corners, square)) continue;
      if (clipped_area(corners, x0, y0, x0 + g.cell, y0 + g.cell) > kAreaEps) cells.push_back(g.linear(ix, iy));
    }
  }
  return cells;
}

GridSpec grid_for(const Rect & bounds, double cell)
{
  GridSpec g;
  g.origin = {bounds.min_x, bounds.min_y};
  g.cell = cell;
  g.nx = std::max(1, static_cast<int>(std::ceil((bounds.max_x - bounds.min_x) / cell)));
  g.ny = std::max(1, static_cast<int>(std::ceil((bounds.max_y - bounds.min_y) / cell)));
  g.validate();
  return g;
}

std::array<Vec2, 4> token_corners(const MotionToken & a, const VehicleDims & box)
{
  return box_corners(OrientedBox{{a.dx, a.dy}, a.dtheta, box});
}

double corner_distance(const MotionToken & a, const MotionToken & b, const VehicleDims & box)
{
  const auto ca = token_corners(a, box);
  const auto cb = token_corners(b, box);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double dx = ca[i].x - cb[i].x;
    const double dy = ca[i].y - cb[i].y;
    sum += std::sqrt(dx * dx + dy * dy);
  }
  return 0.25 * sum;
}

}  // namespace riskenv
