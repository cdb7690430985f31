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

#include "riskenv/toy_predictor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "riskenv/error.hpp"

namespace riskenv
{

using Eigen::MatrixXd;
using Eigen::VectorXd;
using CMap = Eigen::Map<const MatrixXd>;
using Map = Eigen::Map<MatrixXd>;
using CVMap = Eigen::Map<const VectorXd>;
using VMap = Eigen::Map<VectorXd>;

struct ToyPredictor::Layout
{
  int T, H, C, K;
  int dx, dm, du, dctx, din, dout;
  int off, pos, ctx, temb, remb;  // row offsets inside the per-agent input
  std::size_t wc, bc, wr, br, w1, b1, w2, b2, w3, b3, ws, gamma, delta, bs, total;

  explicit Layout(const ToyPredictorConfig & cfg)
  : T(cfg.window_steps), H(cfg.hidden), C(cfg.context), K(cfg.schedule_steps)
  {
    dx = T * kStateDim;
    dm = T;
    du = dx + dm;
    dctx = du + kStateDim + kRiskEmbedDim;
    off = dx + dm;
    pos = off + dx;
    ctx = pos + kPositionFeatures;
    temb = ctx + C;
    remb = temb + kStepEmbedDim;
    din = remb + kRiskEmbedDim;
    dout = dx;
    std::size_t cursor = 0;
    auto take = [&](std::size_t n) {
      const std::size_t at = cursor;
      cursor += n;
      return at;
    };
    wc = take(static_cast<std::size_t>(C) * dctx);
    bc = take(C);
    wr = take(static_cast<std::size_t>(kRiskEmbedDim) * kRiskFeatureDim);
    br = take(kRiskEmbedDim);
    w1 = take(static_cast<std::size_t>(H) * din);
    b1 = take(H);
    w2 = take(static_cast<std::size_t>(H) * H);
    b2 = take(H);
    w3 = take(static_cast<std::size_t>(dout) * H);
    b3 = take(dout);
    ws = take(static_cast<std::size_t>(dout) * din);
    gamma = take(K + 1);
    delta = take(K + 1);
    bs = take(dout);
    total = cursor;
  }
};

namespace
{
using Layout = ToyPredictor::Layout;

VectorXd step_embedding(int k)
{
  VectorXd e(kStepEmbedDim);
  const int half = kStepEmbedDim / 2;
  for (int j = 0; j < half; ++j) {
    const double freq = std::exp(-std::log(1000.0) * j / half);
    e[j] = std::sin(k * freq);
    e[half + j] = std::cos(k * freq);
  }
  return e;
}

VectorXd risk_features(double r)
{
  VectorXd f(kRiskFeatureDim);
  for (int j = 0; j < kRiskFeatureDim / 2; ++j) {
    f[2 * j] = std::sin((j + 1) * std::numbers::pi * r);
    f[2 * j + 1] = std::cos((j + 1) * std::numbers::pi * r);
  }
  return f;
}

constexpr int kFrequencies = 4;

/// Polar coordinates and Fourier features of an anchor position.
void position_features(double x, double y, Eigen::Ref<VectorXd> out)
{
  const double r = std::hypot(x, y);
  out[0] = r;
  out[1] = r > 1e-12 ? x / r : 1.0;
  out[2] = r > 1e-12 ? y / r : 0.0;
  for (int l = 0; l < kFrequencies; ++l) {
    const double w = 0.5 * std::numbers::pi * std::ldexp(1.0, l);
    out[3 + 4 * l] = std::sin(w * x);
    out[4 + 4 * l] = std::cos(w * x);
    out[5 + 4 * l] = std::sin(w * y);
    out[6 + 4 * l] = std::cos(w * y);
  }
}

struct SampleCache
{
  std::vector<int> agents;
  int col0 = 0;
  std::vector<MatrixXd> pair_in;  // per agent a: dctx x P, column b = input of pair (a, b)
  std::vector<MatrixXd> pair;     // per agent a: C x P, column b = h_ab
  MatrixXd weight;                // P x P proximity weights, zero diagonal
  VectorXd denom;                 // per agent pooling normalizer
  VectorXd phi;
  VectorXd remb;
  bool conditional = false;
};

struct ForwardCache
{
  std::vector<SampleCache> samples;
  MatrixXd z, h1, h2, wsz, out;
  VectorXd gamma_col, delta_col;
  std::vector<int> k_col;
};

void forward(
  const Layout & L, const ToyPredictorConfig & cfg, std::span<const double> p,
  std::span<const TrainingSample> batch, ForwardCache & fc)
{
  int cols = 0;
  fc.samples.assign(batch.size(), {});
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const JointTrajectory & x = batch[s].noisy;
    if (x.steps() != L.T) {
      throw ValidationError("predictor expects windows of " + std::to_string(L.T) + " steps");
    }
    if (batch[s].k < 1 || batch[s].k > L.K) throw RangeError("diffusion step out of range");
    SampleCache & sc = fc.samples[s];
    sc.col0 = cols;
    for (int i = 0; i < x.agents(); ++i) {
      if (x.agent_present(i)) sc.agents.push_back(i);
    }
    cols += static_cast<int>(sc.agents.size());
  }

  const CMap wc(p.data() + L.wc, L.C, L.dctx);
  const CVMap bc(p.data() + L.bc, L.C);
  const CMap wr(p.data() + L.wr, kRiskEmbedDim, kRiskFeatureDim);
  const CVMap br(p.data() + L.br, kRiskEmbedDim);

  fc.z.setZero(L.din, cols);
  fc.gamma_col.resize(cols);
  fc.delta_col.resize(cols);
  fc.k_col.assign(cols, 0);
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const TrainingSample & ts = batch[s];
    SampleCache & sc = fc.samples[s];
    const int P = static_cast<int>(sc.agents.size());
    if (P == 0) continue;
    const JointTrajectory & x = ts.noisy;
    // first present state of every agent anchors offsets and proximity
    MatrixXd anchor = MatrixXd::Zero(kStateDim, P);
    for (int a = 0; a < P; ++a) {
      const int i = sc.agents[a];
      int t = 0;
      while (!x.present(i, t)) ++t;
      for (int d = 0; d < kStateDim; ++d) anchor(d, a) = x.at(i, t, d);
    }
    const VectorXd temb = step_embedding(ts.k);
    sc.conditional = !ts.condition.is_unconditional();
    if (sc.conditional) {
      sc.phi = risk_features(ts.condition.value());
      sc.remb = (wr * sc.phi + br).array().tanh();
    } else {
      sc.remb = VectorXd::Zero(kRiskEmbedDim);
    }
    sc.weight.setZero(P, P);
    sc.denom.setOnes(P);
    sc.pair_in.assign(P, MatrixXd());
    sc.pair.assign(P, MatrixXd());
    const double r2 = cfg.context_radius * cfg.context_radius;
    for (int a = 0; a < P; ++a) {
      const int i = sc.agents[a];
      const int col = sc.col0 + a;
      for (int t = 0; t < L.T; ++t) {
        if (!x.present(i, t)) continue;
        fc.z(L.dx + t, col) = 1.0;
        for (int d = 0; d < kStateDim; ++d) {
          fc.z(t * kStateDim + d, col) = x.at(i, t, d);
          fc.z(L.off + t * kStateDim + d, col) = cfg.offset_scale * (x.at(i, t, d) - anchor(d, a));
        }
      }
      position_features(anchor(0, a), anchor(1, a), fc.z.block(L.pos, col, kPositionFeatures, 1));
      VectorXd ctx = VectorXd::Zero(L.C);
      if (P > 1) {
        MatrixXd & in = sc.pair_in[a];
        in.setZero(L.dctx, P);
        double wsum = 0.0;
        for (int b = 0; b < P; ++b) {
          if (b == a) continue;
          const int j = sc.agents[b];
          for (int t = 0; t < L.T; ++t) {
            if (!x.present(j, t)) continue;
            in(L.dx + t, b) = 1.0;
            for (int d = 0; d < kStateDim; ++d) {
              in(t * kStateDim + d, b) = cfg.offset_scale * (x.at(j, t, d) - anchor(d, a));
            }
          }
          in.block(L.du, b, kStateDim, 1) = anchor.col(a);
          in.block(L.du + kStateDim, b, kRiskEmbedDim, 1) = sc.remb;
          const double dxy = (anchor.block(0, b, 2, 1) - anchor.block(0, a, 2, 1)).squaredNorm();
          sc.weight(a, b) = std::exp(-dxy / r2);
          wsum += sc.weight(a, b);
        }
        sc.denom[a] = std::max(1.0, wsum);
        sc.pair[a] = ((wc * in).colwise() + bc).array().tanh();
        ctx = sc.pair[a] * sc.weight.row(a).transpose() / sc.denom[a];
      }
      fc.z.block(L.ctx, col, L.C, 1) = ctx;
      fc.z.block(L.temb, col, kStepEmbedDim, 1) = temb;
      fc.z.block(L.remb, col, kRiskEmbedDim, 1) = sc.remb;
      fc.gamma_col[col] = p[L.gamma + ts.k];
      fc.delta_col[col] = p[L.delta + ts.k];
      fc.k_col[col] = ts.k;
    }
  }

  const CMap w1(p.data() + L.w1, L.H, L.din);
  const CVMap b1(p.data() + L.b1, L.H);
  const CMap w2(p.data() + L.w2, L.H, L.H);
  const CVMap b2(p.data() + L.b2, L.H);
  const CMap w3(p.data() + L.w3, L.dout, L.H);
  const CVMap b3(p.data() + L.b3, L.dout);
  const CMap ws(p.data() + L.ws, L.dout, L.din);
  const CVMap bs(p.data() + L.bs, L.dout);

  fc.h1 = ((w1 * fc.z).colwise() + b1).array().tanh();
  fc.h2 = ((w2 * fc.h1).colwise() + b2).array().tanh();
  fc.wsz = ws * fc.z;
  fc.out = (w3 * fc.h2).colwise() + b3;
  fc.out += fc.wsz * fc.gamma_col.asDiagonal();
  fc.out += bs * fc.delta_col.transpose();
}

std::vector<double> init_params(const Layout & L, std::uint64_t seed)
{
  std::vector<double> p(L.total, 0.0);
  std::mt19937_64 rng(seed);
  auto glorot = [&](std::size_t off, int rows, int cols, double gain) {
    const double a = gain * std::sqrt(6.0 / (rows + cols));
    std::uniform_real_distribution<double> u(-a, a);
    for (std::size_t i = 0; i < static_cast<std::size_t>(rows) * cols; ++i) p[off + i] = u(rng);
  };
  glorot(L.wc, L.C, L.dctx, 1.0);
  glorot(L.wr, kRiskEmbedDim, kRiskFeatureDim, 1.0);
  glorot(L.w1, L.H, L.din, 1.0);
  glorot(L.w2, L.H, L.H, 1.0);
  glorot(L.w3, L.dout, L.H, 0.1);
  glorot(L.ws, L.dout, L.din, 0.1);
  for (int k = 0; k <= L.K; ++k) p[L.gamma + k] = p[L.delta + k] = 1.0;
  std::uniform_real_distribution<double> small(-0.01, 0.01);
  for (int d = 0; d < L.dout; ++d) p[L.bs + d] = small(rng);
  return p;
}

}  // namespace

ToyPredictor::ToyPredictor(const ToyPredictorConfig & cfg) : cfg_(cfg)
{
  if (cfg.window_steps < 1 || cfg.hidden < 1 || cfg.context < 1 || cfg.schedule_steps < 1) {
    throw ValidationError("toy predictor dimensions must be positive");
  }
  params_ = init_params(Layout(cfg), cfg.seed);
}

ToyPredictor::ToyPredictor(const ToyPredictorConfig & cfg, std::vector<double> params)
: cfg_(cfg), params_(std::move(params))
{
  if (params_.size() != Layout(cfg).total) {
    throw ValidationError(
      "toy predictor expects " + std::to_string(Layout(cfg).total) + " parameters, got " +
      std::to_string(params_.size()));
  }
  for (double v : params_) {
    if (!std::isfinite(v)) throw ValidationError("toy predictor weights must be finite");
  }
}

std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>
ToyPredictor::parameter_blocks() const
{
  const Layout L(cfg_);
  const std::vector<std::pair<std::string, std::size_t>> starts{
    {"context_weight", L.wc}, {"context_bias", L.bc}, {"risk_weight", L.wr},
    {"risk_bias", L.br}, {"hidden1_weight", L.w1}, {"hidden1_bias", L.b1},
    {"hidden2_weight", L.w2}, {"hidden2_bias", L.b2}, {"output_weight", L.w3},
    {"output_bias", L.b3}, {"skip_weight", L.ws}, {"skip_gain", L.gamma},
    {"skip_bias_gain", L.delta}, {"skip_bias", L.bs}};
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::size_t end = i + 1 < starts.size() ? starts[i + 1].second : L.total;
    out.push_back({starts[i].first, {starts[i].second, end - starts[i].second}});
  }
  return out;
}

JointTrajectory ToyPredictor::predict(
  const JointTrajectory & noisy, const RiskLevel & condition, int k) const
{
  const Layout L(cfg_);
  TrainingSample s{noisy, JointTrajectory(), condition, k};
  ForwardCache fc;
  forward(L, cfg_, params_, std::span<const TrainingSample>(&s, 1), fc);
  JointTrajectory out(noisy.agents(), noisy.steps(), noisy.dt());
  const SampleCache & sc = fc.samples[0];
  for (std::size_t a = 0; a < sc.agents.size(); ++a) {
    const int i = sc.agents[a];
    for (int t = 0; t < L.T; ++t) {
      if (!noisy.present(i, t)) continue;
      out.set_present(i, t, true);
      for (int d = 0; d < kStateDim; ++d) {
        out.at(i, t, d) = fc.out(t * kStateDim + d, sc.col0 + static_cast<int>(a));
      }
    }
  }
  return out;
}

double ToyPredictor::loss_and_gradient(
  std::span<const TrainingSample> batch, std::vector<double> * grad) const
{
  const Layout L(cfg_);
  ForwardCache fc;
  forward(L, cfg_, params_, batch, fc);

  const int cols = static_cast<int>(fc.out.cols());
  MatrixXd g = MatrixXd::Zero(L.dout, cols);
  double sq = 0.0;
  long n = 0;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const SampleCache & sc = fc.samples[s];
    for (std::size_t a = 0; a < sc.agents.size(); ++a) {
      const int i = sc.agents[a];
      const int col = sc.col0 + static_cast<int>(a);
      for (int t = 1; t < L.T; ++t) {
        if (!batch[s].noisy.present(i, t)) continue;
        for (int d = 0; d < kStateDim; ++d) {
          const int row = t * kStateDim + d;
          const double r = fc.out(row, col) - batch[s].eps.at(i, t, d);
          sq += r * r;
          g(row, col) = r;
          ++n;
        }
      }
    }
  }
  if (n == 0) {
    if (grad) grad->assign(L.total, 0.0);
    return 0.0;
  }
  const double loss = sq / n;
  if (!grad) return loss;
  g *= 2.0 / n;

  grad->assign(L.total, 0.0);
  std::vector<double> & gr = *grad;
  const double * p = params_.data();
  const CMap w1(p + L.w1, L.H, L.din);
  const CMap w2(p + L.w2, L.H, L.H);
  const CMap w3(p + L.w3, L.dout, L.H);
  const CMap ws(p + L.ws, L.dout, L.din);
  const CVMap bs(p + L.bs, L.dout);
  const CMap wc(p + L.wc, L.C, L.dctx);

  Map(gr.data() + L.w3, L.dout, L.H) = g * fc.h2.transpose();
  VMap(gr.data() + L.b3, L.dout) = g.rowwise().sum();
  const MatrixXd g_gamma = g * fc.gamma_col.asDiagonal();
  Map(gr.data() + L.ws, L.dout, L.din) = g_gamma * fc.z.transpose();
  VMap(gr.data() + L.bs, L.dout) = g * fc.delta_col;
  const VectorXd gamma_terms = (g.array() * fc.wsz.array()).colwise().sum();
  const VectorXd delta_terms = (bs.transpose() * g).transpose();
  for (int c = 0; c < cols; ++c) {
    gr[L.gamma + fc.k_col[c]] += gamma_terms[c];
    gr[L.delta + fc.k_col[c]] += delta_terms[c];
  }

  const MatrixXd da2 = (w3.transpose() * g).array() * (1.0 - fc.h2.array().square());
  Map(gr.data() + L.w2, L.H, L.H) = da2 * fc.h1.transpose();
  VMap(gr.data() + L.b2, L.H) = da2.rowwise().sum();
  const MatrixXd da1 = (w2.transpose() * da2).array() * (1.0 - fc.h1.array().square());
  Map(gr.data() + L.w1, L.H, L.din) = da1 * fc.z.transpose();
  VMap(gr.data() + L.b1, L.H) = da1.rowwise().sum();
  const MatrixXd dz = w1.transpose() * da1 + ws.transpose() * g_gamma;

  Map dwc(gr.data() + L.wc, L.C, L.dctx);
  VMap dbc(gr.data() + L.bc, L.C);
  Map dwr(gr.data() + L.wr, kRiskEmbedDim, kRiskFeatureDim);
  VMap dbr(gr.data() + L.br, kRiskEmbedDim);
  for (const SampleCache & sc : fc.samples) {
    const int P = static_cast<int>(sc.agents.size());
    if (P == 0) continue;
    VectorXd dremb = dz.block(L.remb, sc.col0, kRiskEmbedDim, P).rowwise().sum();
    for (int a = 0; P > 1 && a < P; ++a) {
      const VectorXd dctx = dz.block(L.ctx, sc.col0 + a, L.C, 1) / sc.denom[a];
      const MatrixXd dpre = (dctx * sc.weight.row(a)).array() * (1.0 - sc.pair[a].array().square());
      dwc += dpre * sc.pair_in[a].transpose();
      dbc += dpre.rowwise().sum();
      if (sc.conditional) {
        dremb += wc.middleCols(L.du + kStateDim, kRiskEmbedDim).transpose() * dpre.rowwise().sum();
      }
    }
    if (sc.conditional) {
      const VectorXd dar = dremb.array() * (1.0 - sc.remb.array().square());
      dwr += dar * sc.phi.transpose();
      dbr += dar;
    }
  }
  return loss;
}

void TrainingConfig::validate() const
{
  if (!(p_uncond >= 0.0 && p_uncond < 1.0)) throw ValidationError("p must be in [0, 1)");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (batch_size < 1 || epochs < 1) throw ValidationError("batch size and epochs must be positive");
  if (high_risk_repeat < 1) throw ValidationError("high-risk repeat must be at least 1");
}

std::vector<TrainingSample> prepare_training_batch(
  std::span<const LabeledWindow> batch, double p_uncond, const NoiseSchedule & sched,
  std::uint64_t seed)
{
  if (batch.empty()) throw ValidationError("training batch is empty");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> step(1, sched.steps);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution drop(p_uncond);
  std::vector<TrainingSample> out;
  out.reserve(batch.size());
  for (const LabeledWindow & w : batch) {
    TrainingSample s;
    s.k = step(rng);
    s.eps = JointTrajectory(w.window.agents(), w.window.steps(), w.window.dt());
    for (int i = 0; i < w.window.agents(); ++i) {
      for (int t = 0; t < w.window.steps(); ++t) {
        s.eps.set_present(i, t, w.window.present(i, t));
        if (!w.window.present(i, t)) continue;
        for (int d = 0; d < kStateDim; ++d) s.eps.at(i, t, d) = normal(rng);
      }
    }
    s.condition = drop(rng) ? RiskLevel::unconditional() : RiskLevel::of(w.risk);
    s.noisy = forward_noise(w.window, s.k, s.eps, sched);
    for (int i = 0; i < w.window.agents(); ++i) {
      if (!w.window.present(i, 0)) continue;
      for (int d = 0; d < kStateDim; ++d) s.noisy.at(i, 0, d) = w.window.at(i, 0, d);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double training_loss(const NoisePredictor & pred, std::span<const TrainingSample> samples)
{
  if (samples.empty()) throw ValidationError("training batch is empty");
  double sq = 0.0;
  long n = 0;
  for (const TrainingSample & s : samples) {
    const JointTrajectory out = pred.predict(s.noisy, s.condition, s.k);
    for (int i = 0; i < s.noisy.agents(); ++i) {
      for (int t = 1; t < s.noisy.steps(); ++t) {
        if (!s.noisy.present(i, t)) continue;
        for (int d = 0; d < kStateDim; ++d) {
          const double r = out.at(i, t, d) - s.eps.at(i, t, d);
          sq += r * r;
          ++n;
        }
      }
    }
  }
  return n == 0 ? 0.0 : sq / n;
}

double training_loss(
  const NoisePredictor & pred, std::span<const LabeledWindow> batch, double p_uncond,
  const NoiseSchedule & sched, std::uint64_t seed)
{
  const auto samples = prepare_training_batch(batch, p_uncond, sched, seed);
  return training_loss(pred, samples);
}

TrainResult train(
  ToyPredictor & pred, std::span<const LabeledWindow> dataset, const TrainingConfig & cfg,
  const NoiseSchedule & sched, const TrainProgress & progress)
{
  cfg.validate();
  if (dataset.empty()) throw ValidationError("training dataset is empty");
  if (sched.steps != pred.config().schedule_steps) {
    throw ValidationError("noise schedule length does not match the predictor");
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].risk < cfg.high_risk) continue;
    for (int c = 1; c < cfg.high_risk_repeat; ++c) order.push_back(i);
  }

  // fixed evaluation batch, scored before and after training
  std::vector<LabeledWindow> eval;
  {
    std::mt19937_64 eval_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);
    for (int i = 0; i < 256; ++i) eval.push_back(dataset[pick(eval_rng)]);
  }
  const auto eval_samples = prepare_training_batch(eval, cfg.p_uncond, sched, cfg.seed + 1);

  TrainResult result;
  result.initial_loss = pred.loss_and_gradient(eval_samples, nullptr);

  auto params = pred.parameters();
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0), grad;
  constexpr double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8, clip = 5.0;
  std::vector<LabeledWindow> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      batch.clear();
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      for (std::size_t i = start; i < end; ++i) batch.push_back(dataset[order[i]]);
      const auto samples = prepare_training_batch(batch, cfg.p_uncond, sched, rng());
      const double loss = pred.loss_and_gradient(samples, &grad);
      if (!std::isfinite(loss)) {
        throw NumericalError(
          "training diverged at epoch " + std::to_string(epoch) + " step " +
          std::to_string(result.optimizer_steps));
      }
      double norm = 0.0;
      for (double x : grad) norm += x * x;
      norm = std::sqrt(norm);
      const double scale = norm > clip ? clip / norm : 1.0;
      ++result.optimizer_steps;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(result.optimizer_steps));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(result.optimizer_steps));
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double gi = grad[i] * scale;
        m[i] = b1 * m[i] + (1.0 - b1) * gi;
        v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
        params[i] -= cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + adam_eps);
      }
      epoch_sum += loss;
      ++batches;
    }
    result.epoch_losses.push_back(epoch_sum / std::max(1, batches));
    if (progress) progress(epoch, result.epoch_losses.back());
  }
  result.final_loss = pred.loss_and_gradient(eval_samples, nullptr);
  if (!std::isfinite(result.final_loss)) throw NumericalError("training produced non-finite loss");
  return result;
}

}  // namespace riskenv
