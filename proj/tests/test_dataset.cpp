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

#include "riskenv/dataset.hpp"
#include "riskenv/error.hpp"

using namespace riskenv;

namespace
{

Track straight(int id, int first, int len, double x0, double y0, double vx, double vy)
{
  Track tr;
  tr.id = id;
  tr.first_frame = first;
  tr.dims = VehicleDims{};
  const double h = std::atan2(vy, vx);
  for (int t = 0; t < len; ++t) {
    tr.states.push_back(VehicleState::from_heading(x0 + vx * 0.4 * t, y0 + vy * 0.4 * t, h));
  }
  return tr;
}

}  // namespace

TEST(LabelDataset, SingleVehicleGetsCappedRisk)
{
  Recording rec;
  rec.tracks.push_back(straight(1, 0, 12, -20, 0, 5, 0));
  const auto labels = label_dataset(std::span(&rec, 1), SceneConfig{}, RiskParams{});
  ASSERT_EQ(labels.size(), 5u);
  for (const auto & l : labels) {
    EXPECT_FALSE(l.pet.has_value());
    EXPECT_NEAR(l.risk, std::exp(-5.0 * (1.0 - 0.05)), 1e-12);
    EXPECT_NEAR(l.risk, 0.00866, 1e-5);
  }
}

TEST(LabelDataset, CoOccupiedCellGivesRiskOne)
{
  Recording rec;
  rec.tracks.push_back(straight(1, 0, 8, -10, 0, 5, 0));
  rec.tracks.push_back(straight(2, 0, 8, -10, 1.0, 5, 0));  // side by side, overlapping
  const auto labels = label_dataset(std::span(&rec, 1), SceneConfig{}, RiskParams{});
  ASSERT_EQ(labels.size(), 1u);
  ASSERT_TRUE(labels[0].pet.has_value());
  EXPECT_EQ(*labels[0].pet, 0.0);
  EXPECT_EQ(labels[0].risk, 1.0);
}

TEST(LabelDataset, FollowerGetsHeadwayPet)
{
  // same lane, 10 m apart at 5 m/s: the follower reaches each cell 2 s later,
  // less the time it takes to cover one box length plus a cell
  Recording rec;
  rec.tracks.push_back(straight(1, 0, 12, 0, 0.25, 5, 0));
  rec.tracks.push_back(straight(2, 0, 12, -10, 0.25, 5, 0));
  const auto labels = label_dataset(std::span(&rec, 1), SceneConfig{}, RiskParams{});
  ASSERT_FALSE(labels.empty());
  for (const auto & l : labels) {
    ASSERT_TRUE(l.pet.has_value());
    EXPECT_GT(*l.pet, 0.0);
    EXPECT_LT(*l.pet, 2.0);
    EXPECT_GT(l.risk, 0.00866);
    EXPECT_LT(l.risk, 1.0);
  }
}

TEST(LabelDataset, WindowCountIsSlidingArithmetic)
{
  std::vector<Recording> recs(3);
  recs[0].tracks.push_back(straight(1, 0, 20, 0, 0, 1, 0));
  recs[1].tracks.push_back(straight(1, 5, 7, 0, 0, 1, 0));  // shorter than a window
  recs[2].tracks.push_back(straight(1, 0, 10, 0, 0, 1, 0));
  recs[2].tracks.push_back(straight(2, 6, 9, 0, 20, 1, 0));  // spans frames 0..14
  const auto labels = label_dataset(recs, SceneConfig{}, RiskParams{});
  EXPECT_EQ(labels.size(), (20u - 7) + 0u + (15u - 7));
  EXPECT_EQ(labels.back().recording, 2);
  EXPECT_EQ(labels.back().t0, 7);
}

TEST(LabelDataset, RejectsMismatchedDt)
{
  Recording rec;
  rec.dt = 0.2;
  rec.tracks.push_back(straight(1, 0, 10, 0, 0, 1, 0));
  EXPECT_THROW(label_dataset(std::span(&rec, 1), SceneConfig{}, RiskParams{}), ValidationError);
}

TEST(RecordingWindow, KeepsPresentAgentsInTrackOrderUpToCap)
{
  Recording rec;
  for (int i = 0; i < 15; ++i) rec.tracks.push_back(straight(i, i < 2 ? 20 : 0, 8, 10.0 * i, 0, 1, 0));
  const JointTrajectory full = to_joint(rec);
  std::vector<VehicleDims> dims;
  const JointTrajectory w = recording_window(rec, full, 0, 8, 12, &dims);
  EXPECT_EQ(w.agents(), 12);
  EXPECT_EQ(dims.size(), 12u);
  // tracks 0 and 1 start later, so slot 0 holds track 2
  EXPECT_DOUBLE_EQ(w.at(0, 0, 0), 20.0);
  EXPECT_DOUBLE_EQ(w.at(11, 0, 0), 130.0);
  EXPECT_THROW(recording_window(rec, full, 25, 8, 12), RangeError);
}

TEST(TrainingWindows, NormalizesAndKeepsLabels)
{
  Recording rec;
  rec.tracks.push_back(straight(1, 0, 9, -20, 0, 5, 0));
  const auto labels = label_dataset(std::span(&rec, 1), SceneConfig{}, RiskParams{});
  Normalizer n;
  n.mean = {-10.0, 0.0, 0.0, 0.0};
  n.stddev = {10.0, 1.0, 1.0, 1.0};
  const auto tw = training_windows(labels, n);
  ASSERT_EQ(tw.size(), labels.size());
  EXPECT_DOUBLE_EQ(tw[0].window.at(0, 0, 0), -1.0);
  EXPECT_EQ(tw[1].risk, labels[1].risk);
}
