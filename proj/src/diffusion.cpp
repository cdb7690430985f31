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

#include "riskenv/diffusion.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "riskenv/error.hpp"

namespace riskenv
{
namespace
{
void require_same_shape(const JointTrajectory & a, const JointTrajectory & b, const char * what)
{
  if (!a.same_shape(b)) {
    throw ValidationError(
      std::string(what) + ": shape mismatch (" + std::to_string(a.agents()) + "x" +
      std::to_string(a.steps()) + " vs " + std::to_string(b.agents()) + "x" +
      std::to_string(b.steps()) + ")");
  }
}

void require_step(const NoiseSchedule & sched, int k)
{
  if (k < 1 || k > sched.steps) {
    throw RangeError("diffusion step " + std::to_string(k) + " outside [1, " +
                     std::to_string(sched.steps) + "]");
  }
}

template <typename Fn>
void for_present(const JointTrajectory & jt, Fn && fn)
{
  for (int i = 0; i < jt.agents(); ++i) {
    for (int t = 0; t < jt.steps(); ++t) {
      if (!jt.present(i, t)) continue;
      for (int d = 0; d < kStateDim; ++d) fn(jt.index(i, t, d));
    }
  }
}

void inpaint_first(JointTrajectory & tau, const JointTrajectory & fixed)
{
  for (int i = 0; i < tau.agents(); ++i) {
    if (!fixed.present(i, 0)) continue;
    for (int d = 0; d < kStateDim; ++d) tau.at(i, 0, d) = fixed.at(i, 0, d);
  }
}
}  // namespace

NoiseSchedule make_schedule(const std::string & kind, int steps)
{
  if (steps < 2) throw ValidationError("noise schedule needs at least 2 steps");
  NoiseSchedule s;
  s.kind = kind;
  s.steps = steps;
  s.betas.assign(steps + 1, 0.0);
  if (kind == "cosine") {
    constexpr double offset = 0.008;
    auto f = [&](int k) {
      const double c = std::cos((static_cast<double>(k) / steps + offset) / (1.0 + offset) *
                                std::numbers::pi / 2.0);
      return c * c;
    };
    for (int k = 1; k <= steps; ++k) s.betas[k] = std::min(1.0 - f(k) / f(k - 1), 0.999);
  } else if (kind == "linear") {
    const double scale = 1000.0 / steps;
    const double lo = 1e-4 * scale;
    const double hi = 0.02 * scale;
    for (int k = 1; k <= steps; ++k) {
      s.betas[k] = std::min(lo + (hi - lo) * (k - 1) / (steps - 1), 0.999);
    }
  } else {
    throw ValidationError("unknown noise schedule '" + kind + "'");
  }
  s.alpha_bars.assign(steps + 1, 1.0);
  s.posterior_vars.assign(steps + 1, 0.0);
  for (int k = 1; k <= steps; ++k) {
    if (!(s.betas[k] > 0.0 && s.betas[k] < 1.0)) throw ValidationError("beta outside (0, 1)");
    s.alpha_bars[k] = s.alpha_bars[k - 1] * (1.0 - s.betas[k]);
    s.posterior_vars[k] = (1.0 - s.alpha_bars[k - 1]) / (1.0 - s.alpha_bars[k]) * s.betas[k];
  }
  if (!(s.alpha_bars[steps] < 0.01)) {
    throw ValidationError("noise schedule does not reach alpha_bar < 0.01");
  }
  return s;
}

JointTrajectory forward_noise(
  const JointTrajectory & tau0, int k, const JointTrajectory & eps, const NoiseSchedule & sched)
{
  require_same_shape(tau0, eps, "forward_noise");
  require_step(sched, k);
  const double a = std::sqrt(sched.alpha_bars[k]);
  const double b = std::sqrt(1.0 - sched.alpha_bars[k]);
  JointTrajectory out = tau0;
  auto v = out.values();
  const auto x0 = tau0.values();
  const auto e = eps.values();
  for_present(out, [&](std::size_t i) { v[i] = a * x0[i] + b * e[i]; });
  out.zero_masked_out();
  return out;
}

JointTrajectory guided_noise(
  const NoisePredictor & pred, const JointTrajectory & tau_k, const RiskLevel & r, int k,
  double omega)
{
  if (r.is_unconditional()) throw RangeError("guided sampling needs a risk level");
  JointTrajectory uncond = pred.predict(tau_k, RiskLevel::unconditional(), k);
  const JointTrajectory cond = pred.predict(tau_k, r, k);
  require_same_shape(uncond, cond, "guided_noise");
  auto u = uncond.values();
  const auto c = cond.values();
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (1.0 - omega) * u[i] + omega * c[i];
  return uncond;
}

DenoiseResult denoise_step(
  const JointTrajectory & tau_k, const JointTrajectory & eps_hat, int k,
  const NoiseSchedule & sched)
{
  require_same_shape(tau_k, eps_hat, "denoise_step");
  require_step(sched, k);
  const double beta = sched.betas[k];
  const double scale = 1.0 / std::sqrt(1.0 - beta);
  const double coef = beta / std::sqrt(1.0 - sched.alpha_bars[k]);
  DenoiseResult res{tau_k, sched.posterior_vars[k]};
  auto mu = res.mean.values();
  const auto x = tau_k.values();
  const auto e = eps_hat.values();
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = scale * (x[i] - coef * e[i]);
  res.mean.zero_masked_out();
  return res;
}

JointTrajectory analytic_eps(
  const JointTrajectory & m, double s2, const JointTrajectory & tau_k, int k,
  const NoiseSchedule & sched)
{
  require_same_shape(m, tau_k, "analytic_eps");
  require_step(sched, k);
  if (!(s2 > 0.0)) throw ValidationError("analytic predictor variance must be positive");
  const double ab = sched.alpha_bars[k];
  const double gain = std::sqrt(1.0 - ab) / (ab * s2 + 1.0 - ab);
  const double shrink = std::sqrt(ab);
  JointTrajectory out = tau_k;
  auto v = out.values();
  const auto x = tau_k.values();
  const auto mean = m.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = gain * (x[i] - shrink * mean[i]);
  out.zero_masked_out();
  return out;
}

AnalyticGaussianPredictor::AnalyticGaussianPredictor(
  JointTrajectory mean, double variance, NoiseSchedule sched)
: mean_(std::move(mean)), variance_(variance), sched_(std::move(sched))
{
  if (!(variance_ > 0.0)) throw ValidationError("analytic predictor variance must be positive");
}

JointTrajectory AnalyticGaussianPredictor::predict(
  const JointTrajectory & noisy, const RiskLevel & /*condition*/, int k) const
{
  return analytic_eps(mean_, variance_, noisy, k, sched_);
}

void SamplerConfig::validate() const
{
  if (!(omega >= 0.0)) throw ValidationError("guidance scale omega must be non-negative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must be in [0, 1]");
}

Normalizer Normalizer::fit(std::span<const JointTrajectory> data)
{
  std::array<double, kStateDim> sum{};
  std::array<double, kStateDim> sq{};
  double n = 0.0;
  for (const JointTrajectory & jt : data) {
    for (int i = 0; i < jt.agents(); ++i) {
      for (int t = 0; t < jt.steps(); ++t) {
        if (!jt.present(i, t)) continue;
        n += 1.0;
        for (int d = 0; d < kStateDim; ++d) {
          sum[d] += jt.at(i, t, d);
          sq[d] += jt.at(i, t, d) * jt.at(i, t, d);
        }
      }
    }
  }
  Normalizer norm;
  if (n == 0.0) return norm;
  for (int d = 0; d < kStateDim; ++d) {
    norm.mean[d] = sum[d] / n;
    norm.stddev[d] = std::sqrt(std::max(sq[d] / n - norm.mean[d] * norm.mean[d], 1e-12));
  }
  return norm;
}

void Normalizer::normalize(JointTrajectory & jt) const
{
  for (int i = 0; i < jt.agents(); ++i) {
    for (int t = 0; t < jt.steps(); ++t) {
      if (!jt.present(i, t)) continue;
      for (int d = 0; d < kStateDim; ++d) jt.at(i, t, d) = (jt.at(i, t, d) - mean[d]) / stddev[d];
    }
  }
}

void Normalizer::denormalize(JointTrajectory & jt) const
{
  for (int i = 0; i < jt.agents(); ++i) {
    for (int t = 0; t < jt.steps(); ++t) {
      if (!jt.present(i, t)) continue;
      for (int d = 0; d < kStateDim; ++d) jt.at(i, t, d) = jt.at(i, t, d) * stddev[d] + mean[d];
    }
  }
}

void fill_normal(JointTrajectory & jt, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto v = jt.values();
  for_present(jt, [&](std::size_t i) { v[i] = normal(rng); });
}

JointTrajectory sample_model_space(
  const NoisePredictor & pred, const JointTrajectory & shape, const RiskLevel & r,
  const SamplerConfig & cfg, const NoiseSchedule & sched, std::uint64_t seed,
  const SampleOptions & options)
{
  cfg.validate();
  if (r.is_unconditional()) throw RangeError("sampling needs a risk level");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  JointTrajectory tau = shape;
  const double init_scale = std::sqrt(cfg.alpha);
  {
    auto v = tau.values();
    for (double & x : v) x = 0.0;
    for_present(tau, [&](std::size_t i) { v[i] = init_scale * normal(rng); });
  }
  if (options.inpaint) inpaint_first(tau, shape);

  for (int k = sched.steps; k >= 1; --k) {
    if (options.inpaint) inpaint_first(tau, shape);
    if (options.observer) options.observer(k, tau);
    const JointTrajectory eps = guided_noise(pred, tau, r, k, cfg.omega);
    DenoiseResult step = denoise_step(tau, eps, k, sched);
    tau = std::move(step.mean);
    const double scale = std::sqrt(cfg.alpha * step.variance);
    auto v = tau.values();
    bool finite = true;
    for_present(tau, [&](std::size_t i) {
      v[i] += scale * normal(rng);
      finite = finite && std::isfinite(v[i]);
    });
    if (!finite) throw NumericalError("sampler produced non-finite values at step " +
                                      std::to_string(k));
    if (options.inpaint) inpaint_first(tau, shape);
  }
  return tau;
}

JointTrajectory sample(
  const NoisePredictor & pred, std::span<const std::optional<VehicleState>> current, int horizon,
  double dt, const RiskLevel & r, const SamplerConfig & cfg, const NoiseSchedule & sched,
  const Normalizer & norm, std::uint64_t seed, const SampleOptions & options)
{
  if (horizon < 1) throw RangeError("sampling horizon must be positive");
  JointTrajectory shape(static_cast<int>(current.size()), horizon, dt);
  bool any = false;
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (!current[i]) continue;
    any = true;
    for (int t = 0; t < horizon; ++t) shape.set_present(static_cast<int>(i), t, true);
    shape.set_state(static_cast<int>(i), 0, *current[i]);
  }
  if (!any) throw ValidationError("sampling needs at least one present agent");
  norm.normalize(shape);

  JointTrajectory out = sample_model_space(pred, shape, r, cfg, sched, seed, options);
  norm.denormalize(out);
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (!current[i]) continue;
    const int a = static_cast<int>(i);
    out.set_state(a, 0, *current[i]);
    for (int t = 1; t < horizon; ++t) {
      double c = out.at(a, t, 2);
      double s = out.at(a, t, 3);
      const double n = std::hypot(c, s);
      if (n < 1e-9) {
        c = out.at(a, t - 1, 2);
        s = out.at(a, t - 1, 3);
      }
      out.set_state(a, t, VehicleState(out.at(a, t, 0), out.at(a, t, 1), c, s));
    }
  }
  return out;
}

}  // namespace riskenv
