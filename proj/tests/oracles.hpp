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

// Brute-force reference implementations shared by the tests. Nothing here
// calls into the library code it is used to check.

#ifndef RISKENV_TESTS_ORACLES_HPP_
#define RISKENV_TESTS_ORACLES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace oracle
{

struct P
{
  double x, y;
};

inline std::array<P, 4> corners(double cx, double cy, double th, double len, double wid)
{
  const double c = std::cos(th), s = std::sin(th);
  const double hl = 0.5 * len, hw = 0.5 * wid;
  const std::array<P, 4> local{P{hl, hw}, P{hl, -hw}, P{-hl, -hw}, P{-hl, hw}};
  std::array<P, 4> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = {cx + c * local[i].x - s * local[i].y, cy + s * local[i].x + c * local[i].y};
  }
  return out;
}

/// Point inside a posed box, by projection onto the box axes.
inline bool inside(double cx, double cy, double th, double len, double wid, P p, double tol = 0.0)
{
  const double dx = p.x - cx, dy = p.y - cy;
  const double u = std::cos(th) * dx + std::sin(th) * dy;
  const double v = -std::sin(th) * dx + std::cos(th) * dy;
  return std::abs(u) <= 0.5 * len + tol && std::abs(v) <= 0.5 * wid + tol;
}

struct Box
{
  double cx, cy, th, len, wid;
};

/// Dense sampling of a's area at the given spacing, looking for a point in b.
inline bool sampled_overlap(const Box & a, const Box & b, double step)
{
  const int nu = static_cast<int>(std::ceil(a.len / step));
  const int nv = static_cast<int>(std::ceil(a.wid / step));
  const double c = std::cos(a.th), s = std::sin(a.th);
  for (int i = 0; i <= nu; ++i) {
    const double u = -0.5 * a.len + std::min(a.len, i * step);
    for (int j = 0; j <= nv; ++j) {
      const double v = -0.5 * a.wid + std::min(a.wid, j * step);
      const P p{a.cx + c * u - s * v, a.cy + s * u + c * v};
      if (inside(b.cx, b.cy, b.th, b.len, b.wid, p)) return true;
    }
  }
  return false;
}

/// Signed gap between two boxes along the best separating direction found
/// by scanning directions densely; negative means penetration.
inline double separation(const Box & a, const Box & b)
{
  const auto ca = corners(a.cx, a.cy, a.th, a.len, a.wid);
  const auto cb = corners(b.cx, b.cy, b.th, b.len, b.wid);
  double best = -1e300;
  for (int k = 0; k < 3600; ++k) {
    const double ang = M_PI * k / 3600.0;
    const double nx = std::cos(ang), ny = std::sin(ang);
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (int i = 0; i < 4; ++i) {
      const double pa = ca[i].x * nx + ca[i].y * ny, pb = cb[i].x * nx + cb[i].y * ny;
      amin = std::min(amin, pa);
      amax = std::max(amax, pa);
      bmin = std::min(bmin, pb);
      bmax = std::max(bmax, pb);
    }
    best = std::max(best, std::max(bmin - amax, amin - bmax));
  }
  return best;
}

/// Area of the intersection of a convex polygon with an axis-aligned square,
/// by Sutherland-Hodgman clipping.
inline double clip_area(std::vector<P> poly, double x0, double y0, double x1, double y1)
{
  auto clip = [&](auto keep, auto cross) {
    std::vector<P> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const P a = poly[i], b = poly[(i + 1) % poly.size()];
      const bool ka = keep(a), kb = keep(b);
      if (ka) out.push_back(a);
      if (ka != kb) out.push_back(cross(a, b));
    }
    poly = out;
  };
  auto at_x = [](double x) {
    return [x](P a, P b) { return P{x, a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)}; };
  };
  auto at_y = [](double y) {
    return [y](P a, P b) { return P{a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y), y}; };
  };
  clip([&](P p) { return p.x >= x0; }, at_x(x0));
  clip([&](P p) { return p.x <= x1; }, at_x(x1));
  clip([&](P p) { return p.y >= y0; }, at_y(y0));
  clip([&](P p) { return p.y <= y1; }, at_y(y1));
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const P a = poly[i], b = poly[(i + 1) % poly.size()];
    area += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(area);
}

/// Cells (linear index iy * nx + ix) sharing positive area with the box.
inline std::vector<int> raster_by_clipping(
  const Box & b, double ox, double oy, double cell, int nx, int ny, double min_area = 1e-9)
{
  const auto c = corners(b.cx, b.cy, b.th, b.len, b.wid);
  const std::vector<P> poly(c.begin(), c.end());
  std::vector<int> out;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double x0 = ox + ix * cell, y0 = oy + iy * cell;
      if (clip_area(poly, x0, y0, x0 + cell, y0 + cell) > min_area) out.push_back(iy * nx + ix);
    }
  }
  return out;
}

/// Cells containing at least one point of a dense sampling of the box.
inline std::set<int> raster_by_sampling(
  const Box & b, double ox, double oy, double cell, int nx, int ny, double step)
{
  std::set<int> out;
  const double c = std::cos(b.th), s = std::sin(b.th);
  const int nu = static_cast<int>(std::round(b.len / step));
  const int nv = static_cast<int>(std::round(b.wid / step));
  for (int i = 0; i <= nu; ++i) {
    for (int j = 0; j <= nv; ++j) {
      // strictly interior points only, so edge contact cannot register
      const double u = -0.5 * b.len + (i + 0.5) * b.len / (nu + 1);
      const double v = -0.5 * b.wid + (j + 0.5) * b.wid / (nv + 1);
      const double x = b.cx + c * u - s * v, y = b.cy + s * u + c * v;
      const double fx = (x - ox) / cell, fy = (y - oy) / cell;
      const int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
      if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) continue;
      if (fx == ix || fy == iy) continue;  // on a cell boundary
      out.insert(iy * nx + ix);
    }
  }
  return out;
}

/// Minimum PET from per-step cell occupancy without interval merging:
/// occupancy[v][t] lists the cells of vehicle v at step t (empty when absent).
/// Returns nullopt when no cell is visited by two distinct vehicles.
inline std::optional<double> pet_by_enumeration(
  const std::vector<std::vector<std::vector<int>>> & occupancy, double dt)
{
  std::map<int, std::vector<std::pair<int, int>>> visits;  // cell -> (vehicle, step)
  for (std::size_t v = 0; v < occupancy.size(); ++v) {
    for (std::size_t t = 0; t < occupancy[v].size(); ++t) {
      for (int c : occupancy[v][t]) visits[c].push_back({static_cast<int>(v), static_cast<int>(t)});
    }
  }
  std::optional<double> best;
  for (const auto & [cell, vs] : visits) {
    for (const auto & a : vs) {
      for (const auto & b : vs) {
        if (a.first == b.first || b.second < a.second) continue;
        const double gap = b.second * dt - a.second * dt;
        if (!best || gap < *best) best = gap;
      }
    }
  }
  return best;
}

/// Mean corner displacement written out longhand for a box posed by two
/// relative transforms (dx, dy, dtheta).
inline double corner_distance(
  double ax, double ay, double at, double bx, double by, double bt, double len = 3.6,
  double wid = 1.8)
{
  const auto ca = corners(ax, ay, at, len, wid);
  const auto cb = corners(bx, by, bt, len, wid);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) sum += std::hypot(ca[i].x - cb[i].x, ca[i].y - cb[i].y);
  return 0.25 * sum;
}

}  // namespace oracle

#endif  // RISKENV_TESTS_ORACLES_HPP_
