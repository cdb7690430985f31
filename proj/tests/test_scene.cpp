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

#include "riskenv/error.hpp"
#include "riskenv/scene.hpp"

using namespace riskenv;

namespace
{

JointTrajectory random_joint(int agents, int steps, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::uniform_int_distribution<int> span(0, steps);
  JointTrajectory jt(agents, steps, 0.4);
  for (int i = 0; i < agents; ++i) {
    int a = span(rng), b = span(rng);
    if (a > b) std::swap(a, b);
    for (int t = a; t < b; ++t) jt.set_state(i, t, VehicleState::from_heading(u(rng), u(rng), u(rng)));
  }
  return jt;
}

}  // namespace

TEST(HeadingVec, AxisCases)
{
  const auto [c0, s0] = heading_to_vec(0.0);
  EXPECT_EQ(c0, 1.0);
  EXPECT_EQ(s0, 0.0);
  const auto [c1, s1] = heading_to_vec(std::numbers::pi / 2);
  EXPECT_NEAR(c1, 0.0, 1e-15);
  EXPECT_NEAR(s1, 1.0, 1e-15);
}

TEST(HeadingVec, ReferenceValues)
{
  const auto [c, s] = heading_to_vec(0.3);
  EXPECT_NEAR(c, 0.955336489125606, 1e-12);
  EXPECT_NEAR(s, 0.295520206661340, 1e-12);
}

TEST(HeadingVec, RoundTripModTwoPi)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double th = u(rng);
    const auto [c, s] = heading_to_vec(th);
    const double back = vec_to_heading(c, s);
    const double diff = std::remainder(back - th, 2.0 * std::numbers::pi);
    EXPECT_NEAR(diff, 0.0, 1e-9);
  }
}

TEST(HeadingVec, RejectsNonFinite)
{
  EXPECT_THROW(heading_to_vec(std::nan("")), ValidationError);
  EXPECT_THROW(heading_to_vec(INFINITY), ValidationError);
}

TEST(VehicleState, RenormalizesHeading)
{
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const VehicleState s(u(rng), u(rng), u(rng), u(rng));
    EXPECT_NEAR(s.cos_h * s.cos_h + s.sin_h * s.sin_h, 1.0, 1e-12);
  }
}

TEST(ValidateJoint, FullyMaskedIsClean)
{
  EXPECT_TRUE(validate_joint(JointTrajectory(3, 5, 0.4)).empty());
}

TEST(ValidateJoint, UnitNormViolation)
{
  JointTrajectory jt(1, 3, 0.4);
  jt.set_state(0, 0, VehicleState::from_heading(0, 0, 0));
  jt.set_present(0, 1, true);
  jt.at(0, 1, 2) = std::sqrt(1.5);
  jt.at(0, 1, 3) = 0.0;
  const auto v = validate_joint(jt);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "unit-norm");
  EXPECT_EQ(v[0].agent, 0);
  EXPECT_EQ(v[0].step, 1);
}

TEST(ValidateJoint, ContiguityViolation)
{
  JointTrajectory jt(1, 3, 0.4);
  jt.set_state(0, 0, VehicleState::from_heading(0, 0, 0));
  jt.set_state(0, 2, VehicleState::from_heading(1, 0, 0));
  const auto v = validate_joint(jt);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].rule, "contiguity");
}

TEST(SliceWindow, IdentityAndIndexing)
{
  const JointTrajectory jt = random_joint(4, 10, 1);
  EXPECT_EQ(slice_window(jt, 0, 10), jt);
  const JointTrajectory w = slice_window(jt, 2, 8);
  EXPECT_EQ(w.steps(), 8);
  EXPECT_EQ(w.dt(), jt.dt());
  for (int i = 0; i < 4; ++i) {
    for (int t = 0; t < 8; ++t) {
      EXPECT_EQ(w.present(i, t), jt.present(i, t + 2));
      for (int d = 0; d < kStateDim; ++d) EXPECT_EQ(w.at(i, t, d), jt.at(i, t + 2, d));
    }
  }
  EXPECT_THROW(slice_window(jt, 5, 8), RangeError);
}

TEST(SliceWindow, Composes)
{
  const JointTrajectory jt = random_joint(5, 20, 2);
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; b + 4 <= 10; ++b) {
      EXPECT_EQ(slice_window(slice_window(jt, a, 10), b, 4), slice_window(jt, a + b, 4));
    }
  }
}

TEST(RiskLevel, Bounds)
{
  EXPECT_NO_THROW(RiskLevel::of(0.0));
  EXPECT_NO_THROW(RiskLevel::of(1.0));
  EXPECT_THROW(RiskLevel::of(1.5), RangeError);
  EXPECT_THROW(RiskLevel::of(-0.1), RangeError);
  EXPECT_THROW(RiskLevel::of(std::nan("")), RangeError);
  EXPECT_TRUE(RiskLevel::unconditional().is_unconditional());
  EXPECT_FALSE(RiskLevel::of(0.3).is_unconditional());
}

TEST(Recording, JointRoundTrip)
{
  Recording rec;
  rec.dt = 0.4;
  Track a{7, 3, {4.0, 2.0}, {}};
  Track b{2, 5, {3.6, 1.8}, {}};
  for (int k = 0; k < 4; ++k) a.states.push_back(VehicleState::from_heading(k, 0, 0.1 * k));
  for (int k = 0; k < 6; ++k) b.states.push_back(VehicleState::from_heading(0, k, -0.2 * k));
  rec.tracks = {a, b};
  const JointTrajectory jt = to_joint(rec);
  EXPECT_EQ(jt.agents(), 2);
  EXPECT_EQ(jt.steps(), 8);  // frames 3..10
  EXPECT_TRUE(validate_joint(jt).empty());
  const std::vector<int> ids{7, 2};
  const std::vector<VehicleDims> dims{a.dims, b.dims};
  const Recording back = from_joint(jt, ids, dims, 3);
  ASSERT_EQ(back.tracks.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.tracks[i].id, rec.tracks[i].id);
    EXPECT_EQ(back.tracks[i].first_frame, rec.tracks[i].first_frame);
    ASSERT_EQ(back.tracks[i].states.size(), rec.tracks[i].states.size());
    for (std::size_t k = 0; k < back.tracks[i].states.size(); ++k) {
      EXPECT_EQ(back.tracks[i].states[k].px, rec.tracks[i].states[k].px);
      EXPECT_EQ(back.tracks[i].states[k].sin_h, rec.tracks[i].states[k].sin_h);
    }
  }
}
