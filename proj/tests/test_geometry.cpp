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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "riskenv/geometry.hpp"

using namespace riskenv;

namespace
{

OrientedBox box(double x, double y, double th, double l, double w)
{
  return OrientedBox{{x, y}, th, {l, w}};
}

oracle::Box obox(const OrientedBox & b)
{
  return {b.center.x, b.center.y, b.heading, b.dims.length, b.dims.width};
}

GridSpec grid(double ox, double oy, double cell, int nx, int ny)
{
  GridSpec g;
  g.origin = {ox, oy};
  g.cell = cell;
  g.nx = nx;
  g.ny = ny;
  return g;
}

}  // namespace

TEST(BoxCorners, AxisAlignedSquare)
{
  const auto c = box_corners(box(0, 0, 0, 2, 2));
  const double want[4][2] = {{1, 1}, {1, -1}, {-1, -1}, {-1, 1}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(c[i].x, want[i][0]);
    EXPECT_DOUBLE_EQ(c[i].y, want[i][1]);
  }
}

TEST(BoxCorners, HalfTurnMapsFrontLeftToRearRight)
{
  const auto c = box_corners(box(0, 0, std::numbers::pi, 2, 2));
  EXPECT_NEAR(c[0].x, -1.0, 1e-12);
  EXPECT_NEAR(c[0].y, -1.0, 1e-12);
}

TEST(BoxCorners, RotationMatrixOracle)
{
  const double th = std::numbers::pi / 4;
  const auto c = box_corners(box(5, 0, th, 3.6, 1.8));
  const double local[4][2] = {{1.8, 0.9}, {1.8, -0.9}, {-1.8, -0.9}, {-1.8, 0.9}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(c[i].x, 5 + std::cos(th) * local[i][0] - std::sin(th) * local[i][1], 1e-12);
    EXPECT_NEAR(c[i].y, std::sin(th) * local[i][0] + std::cos(th) * local[i][1], 1e-12);
  }
}

TEST(BoxesOverlap, BasicCases)
{
  EXPECT_TRUE(boxes_overlap(box(1, 2, 0.3, 3.6, 1.8), box(1, 2, 0.3, 3.6, 1.8)));
  EXPECT_FALSE(boxes_overlap(box(0, 0, 0, 3.6, 1.8), box(100, 0, 0, 3.6, 1.8)));
  // unit squares in edge contact
  EXPECT_TRUE(boxes_overlap(box(0, 0, 0, 1, 1), box(1, 0, 0, 1, 1)));
  EXPECT_TRUE(oracle::sampled_overlap({0, 0, 0, 1, 1}, {1, 0, 0, 1, 1}, 0.01));
  EXPECT_FALSE(boxes_overlap(box(0, 0, 0, 1, 1), box(1.001, 0, 0, 1, 1)));
}

TEST(BoxesOverlap, AgreesWithSamplingOracle)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-4.0, 4.0), ang(-3.2, 3.2), len(0.5, 5.0), wid(0.3, 2.5);
  int checked = 0;
  for (int n = 0; n < 1000; ++n) {
    const OrientedBox a = box(pos(rng), pos(rng), ang(rng), len(rng), wid(rng));
    const OrientedBox b = box(pos(rng), pos(rng), ang(rng), len(rng), wid(rng));
    const bool got = boxes_overlap(a, b);
    EXPECT_EQ(got, boxes_overlap(b, a));
    if (std::abs(oracle::separation(obox(a), obox(b))) < 0.02) continue;
    const bool want = oracle::sampled_overlap(obox(a), obox(b), 0.01) ||
                      oracle::sampled_overlap(obox(b), obox(a), 0.01);
    EXPECT_EQ(got, want) << "pair " << n;
    ++checked;
  }
  EXPECT_GT(checked, 900);
}

TEST(Rasterize, SingleCellContainment)
{
  const auto cells = rasterize_box(box(3, 3, 0, 1, 1), grid(0, 0, 2, 4, 4));
  EXPECT_EQ(cells, (std::vector<int>{1 * 4 + 1}));
}

TEST(Rasterize, BoxOnJunctionCoversFourCells)
{
  // edges lie on cell boundaries; only cells sharing area are marked
  const auto cells = rasterize_box(box(2, 2, 0, 2, 2), grid(0, 0, 1, 4, 4));
  EXPECT_EQ(cells, (std::vector<int>{1 * 4 + 1, 1 * 4 + 2, 2 * 4 + 1, 2 * 4 + 2}));
}

TEST(Rasterize, MatchesClippingOracle)
{
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(1.0, 9.0), ang(-3.2, 3.2);
  const GridSpec g = grid(0.0, 0.0, 0.5, 20, 20);
  for (int n = 0; n < 300; ++n) {
    const OrientedBox b = box(pos(rng), pos(rng), ang(rng), 3.6, 1.8);
    EXPECT_EQ(rasterize_box(b, g), oracle::raster_by_clipping(obox(b), 0, 0, 0.5, 20, 20));
  }
}

TEST(Rasterize, MatchesSamplingOracleAtPiOverSix)
{
  const OrientedBox b = box(5.13, 4.87, std::numbers::pi / 6, 3.6, 1.8);
  const auto got = rasterize_box(b, grid(0, 0, 0.5, 20, 20));
  const auto sampled = oracle::raster_by_sampling(obox(b), 0, 0, 0.5, 20, 20, 0.01);
  EXPECT_EQ(std::set<int>(got.begin(), got.end()), sampled);
}

TEST(Rasterize, DropsCellsOutsideGrid)
{
  const auto cells = rasterize_box(box(0, 0, 0, 2, 2), grid(0, 0, 1, 4, 4));
  EXPECT_EQ(cells, (std::vector<int>{0}));
}

TEST(Rasterize, InvariantUnderWholeCellOriginShift)
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(3.0, 7.0), ang(-3.2, 3.2);
  const GridSpec g0 = grid(0.0, 0.0, 0.5, 24, 24);
  const GridSpec g1 = grid(-1.0, -1.5, 0.5, 24, 24);  // shift by (2, 3) cells
  for (int n = 0; n < 100; ++n) {
    const OrientedBox b = box(pos(rng), pos(rng), ang(rng), 3.6, 1.8);
    const auto a = rasterize_box(b, g0);
    const auto c = rasterize_box(b, g1);
    ASSERT_EQ(a.size(), c.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(c[i], a[i] + 3 * 24 + 2);
  }
}

TEST(CornerDistance, Examples)
{
  const MotionToken a{1.0, 0.2, 0.1};
  EXPECT_EQ(corner_distance(a, a), 0.0);
  EXPECT_NEAR(corner_distance({1.0, 0.0, 0.2}, {1.5, 0.0, 0.2}), 0.5, 1e-12);
  const double want = std::sqrt(1.8 * 1.8 + 0.9 * 0.9) * std::sqrt(2.0);
  EXPECT_NEAR(corner_distance({2.0, 0.0, 0.0}, {2.0, 0.0, std::numbers::pi / 2}), want, 1e-12);
  EXPECT_NEAR(want, 2.846, 1e-3);
}

TEST(CornerDistance, MatchesLonghandOracleAndMetricAxioms)
{
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-4.0, 4.0), t(-1.0, 1.0);
  for (int n = 0; n < 500; ++n) {
    const MotionToken a{d(rng), d(rng), t(rng)}, b{d(rng), d(rng), t(rng)}, c{d(rng), d(rng), t(rng)};
    EXPECT_NEAR(corner_distance(a, b), oracle::corner_distance(a.dx, a.dy, a.dtheta, b.dx, b.dy, b.dtheta), 1e-12);
    EXPECT_NEAR(corner_distance(a, b), corner_distance(b, a), 1e-12);
    EXPECT_LE(corner_distance(a, c), corner_distance(a, b) + corner_distance(b, c) + 1e-12);
  }
}

TEST(PointInPolygon, BoundaryCountsInside)
{
  const Polygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_TRUE(point_in_polygon(sq, {0.5, 0.5}));
  EXPECT_TRUE(point_in_polygon(sq, {1.0, 0.5}));
  EXPECT_FALSE(point_in_polygon(sq, {1.01, 0.5}));
}
