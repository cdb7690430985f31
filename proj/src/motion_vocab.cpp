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

#include "riskenv/motion_vocab.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

#include "riskenv/error.hpp"

namespace riskenv
{
namespace
{
std::string fnv1a_hex(std::span<const MotionToken> tokens)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (const MotionToken & t : tokens) {
    const double vals[3] = {t.dx, t.dy, t.dtheta};
    unsigned char bytes[sizeof(vals)];
    std::memcpy(bytes, vals, sizeof(vals));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}
}  // namespace

Vocabulary::Vocabulary(std::vector<MotionToken> tokens, VocabularyMeta meta)
: tokens_(std::move(tokens)), meta_(std::move(meta)), corners_(tokens_, meta_.box)
{
  if (tokens_.empty()) throw ValidationError("vocabulary must contain at least one token");
}

void KDisksParams::validate() const
{
  if (vocab_size < 1 || candidates_per_round < 1 || !(coverage_eps > 0.0)) {
    throw ValidationError("k-disks parameters must be positive");
  }
}

MotionToken transition(const VehicleState & s, const VehicleState & s_next)
{
  const double wx = s_next.px - s.px;
  const double wy = s_next.py - s.py;
  MotionToken a;
  a.dx = s.cos_h * wx + s.sin_h * wy;
  a.dy = -s.sin_h * wx + s.cos_h * wy;
  const double c = s.cos_h * s_next.cos_h + s.sin_h * s_next.sin_h;
  const double sn = s.cos_h * s_next.sin_h - s.sin_h * s_next.cos_h;
  a.dtheta = std::atan2(sn, c);
  if (a.dtheta == -std::numbers::pi) a.dtheta = std::numbers::pi;
  return a;
}

std::vector<MotionToken> extract_transitions(std::span<const Trajectory> trajectories, double dt)
{
  std::vector<MotionToken> out;
  for (const Trajectory & tr : trajectories) {
    if (std::abs(tr.dt - dt) > 1e-9) {
      throw ValidationError(
        "trajectory dt " + std::to_string(tr.dt) + " does not match vocabulary dt " +
        std::to_string(dt));
    }
    for (std::size_t i = 0; i + 1 < tr.states.size(); ++i) {
      out.push_back(transition(tr.states[i], tr.states[i + 1]));
    }
  }
  return out;
}

Vocabulary build_vocabulary(
  std::span<const MotionToken> transitions, const KDisksParams & params, double dt)
{
  params.validate();
  if (transitions.empty()) throw ValidationError("cannot build a vocabulary from no transitions");

  const kernels::CornerTable pool(transitions);
  std::vector<std::uint8_t> active(transitions.size(), 1);
  std::vector<int> uncovered(transitions.size());
  for (std::size_t i = 0; i < uncovered.size(); ++i) uncovered[i] = static_cast<int>(i);

  std::mt19937_64 rng(params.seed);
  std::vector<int> candidates(params.candidates_per_round);
  std::vector<int> counts(params.candidates_per_round);
  std::vector<MotionToken> tokens;

  while (!uncovered.empty() && static_cast<int>(tokens.size()) < params.vocab_size) {
    std::uniform_int_distribution<std::size_t> pick(0, uncovered.size() - 1);
    for (int & c : candidates) c = uncovered[pick(rng)];
    kernels::omp::count_within(pool, active, candidates, params.coverage_eps, counts);
    const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
    const int center = candidates[best];
    tokens.push_back(transitions[center]);
    kernels::omp::clear_within(pool, active, center, params.coverage_eps);
    std::erase_if(uncovered, [&](int i) { return !active[i]; });
  }

  VocabularyMeta meta;
  meta.dt = dt;
  meta.coverage_eps = params.coverage_eps;
  meta.source_hash = fnv1a_hex(transitions);
  return Vocabulary(std::move(tokens), std::move(meta));
}

TokenMatch nearest_token(const MotionToken & proposed, const Vocabulary & v)
{
  const auto corners = token_corners(proposed, v.meta().box);
  TokenMatch best;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v.corners().distance(i, corners);
    if (best.index < 0 || d < best.distance) {
      best.index = static_cast<int>(i);
      best.distance = d;
    }
  }
  best.token = v[best.index];
  return best;
}

VehicleState apply_token(const VehicleState & s, const MotionToken & a)
{
  const double px = s.px + s.cos_h * a.dx - s.sin_h * a.dy;
  const double py = s.py + s.sin_h * a.dx + s.cos_h * a.dy;
  const double cd = std::cos(a.dtheta);
  const double sd = std::sin(a.dtheta);
  return VehicleState(px, py, s.cos_h * cd - s.sin_h * sd, s.sin_h * cd + s.cos_h * sd);
}

JointTrajectory dynamics_check(const JointTrajectory & raw, const Vocabulary & v)
{
  JointTrajectory out = raw;
  const int agents = raw.agents();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < agents; ++i) {
    for (int t = 0; t + 1 < raw.steps(); ++t) {
      if (!raw.present(i, t + 1)) continue;
      if (!raw.present(i, t)) continue;  // first present step starts the chain
      const VehicleState cur = out.state(i, t);
      const VehicleState next(
        raw.at(i, t + 1, 0), raw.at(i, t + 1, 1), raw.at(i, t + 1, 2), raw.at(i, t + 1, 3));
      const TokenMatch m = nearest_token(transition(cur, next), v);
      out.set_state(i, t + 1, apply_token(cur, m.token));
    }
  }
  return out;
}

double coverage_radius(std::span<const MotionToken> transitions, const Vocabulary & v)
{
  const kernels::CornerTable queries(transitions, v.meta().box);
  std::vector<kernels::Nearest> nearest(transitions.size());
  kernels::omp::nearest(v.corners(), queries, nearest);
  double worst = 0.0;
  for (const auto & n : nearest) worst = std::max(worst, n.distance);
  return worst;
}

}  // namespace riskenv
