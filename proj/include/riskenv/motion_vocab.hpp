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

#ifndef RISKENV_MOTION_VOCAB_HPP_
#define RISKENV_MOTION_VOCAB_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riskenv/geometry.hpp"
#include "riskenv/kernels.hpp"
#include "riskenv/scene.hpp"

namespace riskenv
{

struct VocabularyMeta
{
  double dt = 0.4;
  VehicleDims box = kTokenBox;
  double coverage_eps = 0.05;
  std::string source_hash;
};

/// Immutable set of allowed one-step transitions.
class Vocabulary
{
public:
  Vocabulary(std::vector<MotionToken> tokens, VocabularyMeta meta);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<MotionToken> & tokens() const { return tokens_; }
  const MotionToken & operator[](std::size_t i) const { return tokens_[i]; }
  const VocabularyMeta & meta() const { return meta_; }
  const kernels::CornerTable & corners() const { return corners_; }

private:
  std::vector<MotionToken> tokens_;
  VocabularyMeta meta_;
  kernels::CornerTable corners_;
};

struct KDisksParams
{
  int vocab_size = 1024;
  int candidates_per_round = 32;
  double coverage_eps = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Transition from s to s_next expressed in the ego frame of s.
MotionToken transition(const VehicleState & s, const VehicleState & s_next);

/// Every consecutive-state transition of every trajectory.
std::vector<MotionToken> extract_transitions(std::span<const Trajectory> trajectories, double dt);

/// Greedy k-disks coverage: each round samples candidates from the uncovered
/// pool, keeps the one whose eps-disk covers the most uncovered transitions.
Vocabulary build_vocabulary(
  std::span<const MotionToken> transitions, const KDisksParams & params, double dt = 0.4);

struct TokenMatch
{
  int index = -1;
  MotionToken token;
  double distance = 0.0;
};

TokenMatch nearest_token(const MotionToken & proposed, const Vocabulary & v);

VehicleState apply_token(const VehicleState & s, const MotionToken & a);

/// Auto-regressive snapping of every agent's trajectory onto vocabulary
/// transitions. State 0 and masked-out entries are left untouched.
JointTrajectory dynamics_check(const JointTrajectory & raw, const Vocabulary & v);

/// Largest distance from any transition to its nearest token.
double coverage_radius(std::span<const MotionToken> transitions, const Vocabulary & v);

}  // namespace riskenv

#endif  // RISKENV_MOTION_VOCAB_HPP_
