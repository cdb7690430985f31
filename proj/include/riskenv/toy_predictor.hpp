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

#ifndef RISKENV_TOY_PREDICTOR_HPP_
#define RISKENV_TOY_PREDICTOR_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskenv/diffusion.hpp"
#include "riskenv/scene.hpp"

namespace riskenv
{

struct ToyPredictorConfig
{
  int window_steps = 8;     // T
  int hidden = 128;         // width of both hidden layers
  int context = 32;         // pooled cross-agent feature width
  int schedule_steps = 100; // K, sizes the per-step skip gains
  /// Multiplier on relative offsets (model-space units) fed to the network.
  double offset_scale = 2.5;
  /// Length scale of the proximity weights in the context pooling, in
  /// model-space units.
  double context_radius = 0.6;
  std::uint64_t seed = 0;   // weight initialization
};

inline constexpr int kStepEmbedDim = 16;
inline constexpr int kRiskEmbedDim = 16;
inline constexpr int kRiskFeatureDim = 8;
/// Polar (3) and Fourier (16) features of an agent's first present position.
inline constexpr int kPositionFeatures = 19;

/// One supervised example: the noisy window (slot 0 already replaced by the
/// clean first state), its noise target, condition and step.
struct TrainingSample
{
  JointTrajectory noisy;
  JointTrajectory eps;
  RiskLevel condition = RiskLevel::unconditional();
  int k = 1;
};

/// Small per-agent MLP epsilon model.
///
/// Each present agent i is processed independently from
///   z_i = [window_i, mask_i, scaled offsets of window_i from its first
///          state, position features of that state, pooled context,
///          sinusoidal step embedding, risk embedding]
/// The pooled context is sum_j w_ij h_ij / max(1, sum_j w_ij) over the other
/// agents j, with h_ij = tanh(Wc [scaled offsets of window_j from i's first
/// state, mask_j, first state of i, risk embedding] + bc) and proximity weights
/// w_ij = exp(-d_ij^2 / radius^2) from the agents' first present positions.
/// The risk embedding is tanh(Wr phi(r) + br), all zeros for the
/// unconditional marker. Two tanh layers follow, plus a step-gated linear
/// skip gamma_k Ws z + delta_k bs. Permuting agents permutes the output.
class ToyPredictor : public NoisePredictor
{
public:
  explicit ToyPredictor(const ToyPredictorConfig & cfg);
  ToyPredictor(const ToyPredictorConfig & cfg, std::vector<double> params);

  JointTrajectory predict(
    const JointTrajectory & noisy, const RiskLevel & condition, int k) const override;

  const ToyPredictorConfig & config() const { return cfg_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  std::size_t parameter_count() const { return params_.size(); }
  /// Named (offset, size) ranges of parameters(), in storage order.
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> parameter_blocks() const;

  /// Mean squared error over present entries with t >= 1, and optionally its
  /// gradient with respect to parameters().
  double loss_and_gradient(std::span<const TrainingSample> batch, std::vector<double> * grad) const;

  struct Layout;

private:
  ToyPredictorConfig cfg_;
  std::vector<double> params_;
};

struct LabeledWindow
{
  JointTrajectory window;
  double risk = 0.0;
};

struct TrainingConfig
{
  double p_uncond = 0.25;  // Bernoulli condition-dropout probability
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 10;
  // Windows labeled at or above high_risk appear high_risk_repeat times per
  // epoch. Reweighting r leaves the conditional distributions unchanged.
  double high_risk = 0.5;
  int high_risk_repeat = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Draws k ~ U{1..K}, eps ~ N(0, I) and the dropout coin per window, noises
/// the window and pins slot 0 to the clean first state.
std::vector<TrainingSample> prepare_training_batch(
  std::span<const LabeledWindow> batch, double p_uncond, const NoiseSchedule & sched,
  std::uint64_t seed);

/// Masked MSE between target noise and the predictor's output, slot 0 excluded.
double training_loss(const NoisePredictor & pred, std::span<const TrainingSample> samples);

double training_loss(
  const NoisePredictor & pred, std::span<const LabeledWindow> batch, double p_uncond,
  const NoiseSchedule & sched, std::uint64_t seed);

struct TrainResult
{
  double initial_loss = 0.0;  // fixed evaluation batch, before training
  double final_loss = 0.0;    // same batch, after training
  std::vector<double> epoch_losses;
  long optimizer_steps = 0;
};

using TrainProgress = std::function<void(int epoch, double mean_loss)>;

/// Adam on the masked MSE objective over model-space windows.
TrainResult train(
  ToyPredictor & pred, std::span<const LabeledWindow> dataset, const TrainingConfig & cfg,
  const NoiseSchedule & sched, const TrainProgress & progress = {});

/// Everything needed to sample: schedule, normalization, trained weights.
struct DiffusionModel
{
  NoiseSchedule schedule;
  Normalizer normalizer;
  ToyPredictor predictor;
};

}  // namespace riskenv

#endif  // RISKENV_TOY_PREDICTOR_HPP_
