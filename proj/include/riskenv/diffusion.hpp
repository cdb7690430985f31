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

#ifndef RISKENV_DIFFUSION_HPP_
#define RISKENV_DIFFUSION_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskenv/scene.hpp"

namespace riskenv
{

/// DDPM variance schedule. Vectors are indexed by step k in [0, K]; entry 0
/// is the clean-data boundary (alpha_bar = 1, beta = 0).
struct NoiseSchedule
{
  std::string kind;
  int steps = 0;
  std::vector<double> betas;
  std::vector<double> alpha_bars;
  std::vector<double> posterior_vars;
};

/// "cosine" (default) or "linear".
NoiseSchedule make_schedule(const std::string & kind, int steps);

/// Pluggable epsilon model. Implementations must be deterministic and
/// accept the unconditional marker.
class NoisePredictor
{
public:
  virtual ~NoisePredictor() = default;
  virtual JointTrajectory predict(
    const JointTrajectory & noisy, const RiskLevel & condition, int k) const = 0;
};

/// Closed-form marginal sqrt(ab_k) tau0 + sqrt(1 - ab_k) eps on present entries.
JointTrajectory forward_noise(
  const JointTrajectory & tau0, int k, const JointTrajectory & eps, const NoiseSchedule & sched);

/// (1 - omega) eps(empty) + omega eps(r); exact at omega 0 and 1.
JointTrajectory guided_noise(
  const NoisePredictor & pred, const JointTrajectory & tau_k, const RiskLevel & r, int k,
  double omega);

struct DenoiseResult
{
  JointTrajectory mean;
  double variance = 0.0;
};

DenoiseResult denoise_step(
  const JointTrajectory & tau_k, const JointTrajectory & eps_hat, int k,
  const NoiseSchedule & sched);

/// Optimal epsilon for isotropic Gaussian data N(m, s2 I).
JointTrajectory analytic_eps(
  const JointTrajectory & m, double s2, const JointTrajectory & tau_k, int k,
  const NoiseSchedule & sched);

class AnalyticGaussianPredictor : public NoisePredictor
{
public:
  AnalyticGaussianPredictor(JointTrajectory mean, double variance, NoiseSchedule sched);

  JointTrajectory predict(
    const JointTrajectory & noisy, const RiskLevel & condition, int k) const override;

private:
  JointTrajectory mean_;
  double variance_;
  NoiseSchedule sched_;
};

struct SamplerConfig
{
  double omega = 1.5;
  /// Low-temperature factor on sampling variances. Zero is accepted and
  /// makes sampling deterministic.
  double alpha = 0.5;

  void validate() const;
};

/// Per-dimension affine map between world states and model space.
struct Normalizer
{
  std::array<double, kStateDim> mean{0.0, 0.0, 0.0, 0.0};
  std::array<double, kStateDim> stddev{1.0, 1.0, 1.0, 1.0};

  /// Mean and standard deviation over present entries.
  static Normalizer fit(std::span<const JointTrajectory> data);

  void normalize(JointTrajectory & jt) const;
  void denormalize(JointTrajectory & jt) const;
};

using SampleObserver = std::function<void(int k, const JointTrajectory & tau_k)>;

struct SampleOptions
{
  /// Overwrite slot t = 0 with the supplied states around every step.
  bool inpaint = true;
  /// Called with tau^k right before each predictor query.
  SampleObserver observer;
};

/// Reverse diffusion in model space. `shape` supplies dimensions and mask;
/// when inpainting, its t = 0 entries are the fixed first state.
JointTrajectory sample_model_space(
  const NoisePredictor & pred, const JointTrajectory & shape, const RiskLevel & r,
  const SamplerConfig & cfg, const NoiseSchedule & sched, std::uint64_t seed,
  const SampleOptions & options = {});

/// Samples a joint future (horizon steps) for the agents present in
/// `current`, with slot 0 pinned to their current states. World coordinates in
/// and out; headings of the result are renormalized.
JointTrajectory sample(
  const NoisePredictor & pred, std::span<const std::optional<VehicleState>> current, int horizon,
  double dt, const RiskLevel & r, const SamplerConfig & cfg, const NoiseSchedule & sched,
  const Normalizer & norm, std::uint64_t seed, const SampleOptions & options = {});

/// Fills every present entry with independent standard normal draws.
void fill_normal(JointTrajectory & jt, std::uint64_t seed);

}  // namespace riskenv

#endif  // RISKENV_DIFFUSION_HPP_
