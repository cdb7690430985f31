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
#include <random>

#include "oracles.hpp"
#include "riskenv/safety_metrics.hpp"

using namespace riskenv;

namespace
{

GridSpec small_grid()
{
  GridSpec g;
  g.origin = {0.0, 0.0};
  g.cell = 0.5;
  g.nx = 24;
  g.ny = 24;
  return g;
}

OccupancyEvent ev(int cell, int vehicle, double t0, double t1)
{
  return {cell, vehicle, static_cast<int>(std::lround(t0 / 0.4)), static_cast<int>(std::lround(t1 / 0.4)), t0, t1};
}

/// Up to 4 vehicles moving on random straight or turning paths inside the grid.
JointTrajectory random_scene(std::mt19937_64 & rng)
{
  std::uniform_int_distribution<int> nveh(1, 4), nsteps(2, 20);
  std::uniform_real_distribution<double> pos(2.0, 10.0), ang(-3.2, 3.2), spd(0.0, 2.0), turn(-0.3, 0.3);
  const int n = nveh(rng), T = nsteps(rng);
  JointTrajectory jt(n, T, 0.4);
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> start(0, T - 1);
    const int a = start(rng);
    std::uniform_int_distribution<int> stop(a + 1, T);
    const int b = stop(rng);
    double x = pos(rng), y = pos(rng), th = ang(rng);
    const double v = spd(rng), w = turn(rng);
    for (int t = a; t < b; ++t) {
      jt.set_state(i, t, VehicleState::from_heading(x, y, th));
      x += v * std::cos(th);
      y += v * std::sin(th);
      th += w;
    }
  }
  return jt;
}

}  // namespace

TEST(RiskFromPet, Examples)
{
  const RiskParams p;
  EXPECT_EQ(risk_from_pet(0.0, p), 1.0);
  EXPECT_EQ(risk_from_pet(0.16, p), 1.0);
  EXPECT_NEAR(risk_from_pet(1.0, p), std::exp(-1.3125), 1e-15);
  EXPECT_NEAR(risk_from_pet(1.0, p), 0.2691, 1e-4);
  EXPECT_NEAR(risk_from_pet(3.2, p), std::exp(-4.75), 1e-12);
  EXPECT_NEAR(risk_from_pet(PetResult{}, p), 0.00865169520312063, 1e-12);
}

TEST(RiskFromPet, MonotoneAndBounded)
{
  const RiskParams p;
  double prev = 2.0;
  for (int i = 0; i <= 1000; ++i) {
    const double pet = 0.01 * i;
    const double r = risk_from_pet(pet, p);
    EXPECT_LE(r, prev);
    EXPECT_GT(r, 0.0);
    EXPECT_LE(r, 1.0);
    if (pet <= p.sigma * p.t_norm) EXPECT_EQ(r, 1.0);
    prev = r;
  }
}

TEST(ScenePet, DefinitionExamples)
{
  const std::vector<OccupancyEvent> disjoint{ev(5, 0, 1.2, 2.0), ev(5, 1, 2.8, 3.6)};
  const PetResult a = scene_pet(disjoint);
  ASSERT_TRUE(a.value);
  EXPECT_NEAR(*a.value, 0.8, 1e-12);
  EXPECT_EQ(a.cell, 5);

  const std::vector<OccupancyEvent> overlap{ev(5, 0, 1.2, 2.4), ev(5, 1, 2.0, 3.2)};
  const PetResult b = scene_pet(overlap);
  ASSERT_TRUE(b.value);
  EXPECT_EQ(*b.value, 0.0);

  const std::vector<OccupancyEvent> single{ev(5, 0, 1.2, 2.4), ev(6, 0, 2.0, 3.2)};
  EXPECT_FALSE(scene_pet(single).value);
}

TEST(Occupancy, StaticVehicleHasOneEventPerCell)
{
  JointTrajectory jt(1, 6, 0.4);
  for (int t = 0; t < 6; ++t) jt.set_state(0, t, VehicleState::from_heading(5.1, 5.2, 0.3));
  const auto events = occupancy_intervals(jt, {}, small_grid());
  const auto cells = rasterize_box(OrientedBox::of(jt.state(0, 0), VehicleDims{}), small_grid());
  ASSERT_EQ(events.size(), cells.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_EQ(events[i].cell, cells[i]);
    EXPECT_EQ(events[i].t_enter, 0.0);
    EXPECT_NEAR(events[i].t_exit, 5 * 0.4, 1e-12);
  }
}

TEST(Occupancy, ReentryYieldsTwoEvents)
{
  JointTrajectory jt(1, 9, 0.4);
  for (int t = 0; t < 9; ++t) {
    const double x = (t >= 3 && t < 7) ? 9.0 : 5.0;
    jt.set_state(0, t, VehicleState::from_heading(x, 5.0, 0.0));
  }
  const auto events = occupancy_intervals(jt, {}, small_grid());
  const int cell = rasterize_box(OrientedBox::of(jt.state(0, 0), VehicleDims{}), small_grid()).front();
  int count = 0;
  for (const auto & e : events) {
    if (e.cell != cell) continue;
    ++count;
    EXPECT_TRUE((e.step_enter == 0 && e.step_exit == 2) || (e.step_enter == 7 && e.step_exit == 8));
  }
  EXPECT_EQ(count, 2);
}

TEST(Occupancy, CrossingTrajectoriesMatchPerStepRasterization)
{
  JointTrajectory jt(2, 12, 0.4);
  for (int t = 0; t < 12; ++t) {
    jt.set_state(0, t, VehicleState::from_heading(1.0 + 0.8 * t, 6.0, 0.0));
    jt.set_state(1, t, VehicleState::from_heading(6.0, 1.0 + 0.9 * t, M_PI / 2));
  }
  const GridSpec g = small_grid();
  std::map<std::pair<int, int>, std::vector<int>> steps;  // (cell, vehicle) -> steps
  for (int v = 0; v < 2; ++v) {
    for (int t = 0; t < 12; ++t) {
      for (int c : oracle::raster_by_clipping({jt.at(v, t, 0), jt.at(v, t, 1), jt.state(v, t).heading(), 3.6, 1.8}, 0, 0, 0.5, 24, 24)) {
        steps[{c, v}].push_back(t);
      }
    }
  }
  std::vector<OccupancyEvent> want;
  for (const auto & [key, ts] : steps) {
    std::size_t i = 0;
    while (i < ts.size()) {
      std::size_t j = i;
      while (j + 1 < ts.size() && ts[j + 1] == ts[j] + 1) ++j;
      want.push_back({key.first, key.second, ts[i], ts[j], ts[i] * 0.4, ts[j] * 0.4});
      i = j + 1;
    }
  }
  const auto got = occupancy_intervals(jt, {}, g);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].cell, want[i].cell);
    EXPECT_EQ(got[i].vehicle, want[i].vehicle);
    EXPECT_EQ(got[i].step_enter, want[i].step_enter);
    EXPECT_EQ(got[i].step_exit, want[i].step_exit);
    EXPECT_NEAR(got[i].t_enter, want[i].t_enter, 1e-12);
    EXPECT_NEAR(got[i].t_exit, want[i].t_exit, 1e-12);
  }
}

TEST(ScenePet, MatchesEnumerationOracleOnRandomScenes)
{
  std::mt19937_64 rng(77);
  const GridSpec g = small_grid();
  int with_pet = 0;
  for (int n = 0; n < 200; ++n) {
    const JointTrajectory jt = random_scene(rng);
    std::vector<std::vector<std::vector<int>>> occ(jt.agents(), std::vector<std::vector<int>>(jt.steps()));
    for (int v = 0; v < jt.agents(); ++v) {
      for (int t = 0; t < jt.steps(); ++t) {
        if (!jt.present(v, t)) continue;
        occ[v][t] = oracle::raster_by_clipping(
          {jt.at(v, t, 0), jt.at(v, t, 1), jt.state(v, t).heading(), 3.6, 1.8}, 0, 0, 0.5, 24, 24);
      }
    }
    const auto want = oracle::pet_by_enumeration(occ, 0.4);
    const PetResult got = joint_pet(jt, {}, g);
    ASSERT_EQ(got.value.has_value(), want.has_value()) << "scene " << n;
    if (want) {
      EXPECT_EQ(*got.value, *want) << "scene " << n;
      ++with_pet;
    }
  }
  EXPECT_GT(with_pet, 50);
}

TEST(Collisions, IdenticalPosesCollideEveryStep)
{
  JointTrajectory jt(2, 5, 0.4);
  for (int t = 0; t < 5; ++t) {
    jt.set_state(0, t, VehicleState::from_heading(t, 0, 0));
    jt.set_state(1, t, VehicleState::from_heading(t, 0, 0));
  }
  const auto c = detect_collisions(jt, {});
  ASSERT_EQ(c.size(), 5u);
  for (int t = 0; t < 5; ++t) EXPECT_EQ(c[t], (Collision{t, 0, 1}));
}

TEST(Collisions, FarApartIsEmpty)
{
  JointTrajectory jt(3, 5, 0.4);
  for (int t = 0; t < 5; ++t) {
    for (int i = 0; i < 3; ++i) jt.set_state(i, t, VehicleState::from_heading(25.0 * i, t, 0));
  }
  EXPECT_TRUE(detect_collisions(jt, {}).empty());
}

TEST(Collisions, ConflictTwoSecondsApartIsNotACollision)
{
  JointTrajectory jt(2, 20, 0.4);
  for (int t = 0; t < 20; ++t) {
    jt.set_state(0, t, VehicleState::from_heading(-10.0 + 2.0 * t, 0.0, 0.0));
    // reaches the crossing point (0, 0) at t = 10, 2 s after vehicle 0 did
    jt.set_state(1, t, VehicleState::from_heading(0.0, -20.0 + 2.0 * t, M_PI / 2));
  }
  EXPECT_TRUE(detect_collisions(jt, {}).empty());
  GridSpec g;
  g.origin = {-40, -40};
  g.nx = 160;
  g.ny = 160;
  const PetResult pet = joint_pet(jt, {}, g);
  ASSERT_TRUE(pet.value);
  EXPECT_GT(*pet.value, 0.0);
}

TEST(Collisions, SkipsPairsOnSpawnStep)
{
  JointTrajectory jt(2, 4, 0.4);
  for (int t = 0; t < 4; ++t) jt.set_state(0, t, VehicleState::from_heading(0, 0, 0));
  for (int t = 2; t < 4; ++t) jt.set_state(1, t, VehicleState::from_heading(0.5, 0, 0));
  const auto c = detect_collisions(jt, {});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (Collision{3, 0, 1}));
}

TEST(Collisions, ImplyZeroPet)
{
  std::mt19937_64 rng(5);
  const GridSpec g = small_grid();
  for (int n = 0; n < 300; ++n) {
    const JointTrajectory jt = random_scene(rng);
    if (detect_collisions(jt, {}).empty()) continue;
    const PetResult p = joint_pet(jt, {}, g);
    ASSERT_TRUE(p.value);
    EXPECT_EQ(*p.value, 0.0);
  }
}

TEST(WindowPets, CoverEveryStart)
{
  std::mt19937_64 rng(9);
  JointTrajectory jt(3, 20, 0.4);
  for (int i = 0; i < 3; ++i) {
    for (int t = 0; t < 20; ++t) jt.set_state(i, t, VehicleState::from_heading(3.0 + 0.4 * t, 3.0 + 4.0 * i, 0.0));
  }
  const auto w = window_pets(jt, {}, small_grid(), 8, 2);
  ASSERT_EQ(w.size(), 11u);
  for (std::size_t k = 0; k < w.size(); ++k) {
    EXPECT_EQ(w[k].t0, static_cast<int>(k) + 2);
    const PetResult direct = joint_pet(slice_window(jt, w[k].t0, 8), {}, small_grid());
    EXPECT_EQ(w[k].pet, direct.value);
  }
}
