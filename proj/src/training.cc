// src/training.cc

// Copyright 2026  vaeverif authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "vaeverif/training.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vaeverif/error.h"
#include "vaeverif/eval.h"
#include "vaeverif/scoring.h"

namespace vaeverif {

namespace {

Vector Augment(const Vector &v) {
  Vector out(v.size() + 1);
  out.head(v.size()) = v;
  out[v.size()] = 1.0;
  return out;
}

// 1 where the precision pre-activation is inside the clamp range.
Vector ClampMask(const Vector &pre) {
  Vector m(pre.size());
  for (Eigen::Index i = 0; i < pre.size(); ++i)
    m[i] = std::abs(pre[i]) <= kPrecisionClamp ? 1.0 : 0.0;
  return m;
}

void CheckFinite(const Vector &v, const char *name) {
  if (!v.allFinite())
    throw NumericError(std::string("non-finite intermediate ") + name);
}


Checkpoint Evaluate(const VaeModel &model, const DevSet &dev, int iter) {
  const ScoreSet scores =
      ScoreTrials(dev.trials, dev.vectors, model, model.config.k_score,
                  model.config.seed);
  std::vector<double> values;
  std::vector<bool> is_target;
  for (const ScoredTrial &s : scores) {
    if (s.trial.label == TrialLabel::kUnknown) continue;
    values.push_back(s.score);
    is_target.push_back(s.trial.label == TrialLabel::kTarget);
  }
  Checkpoint cp;
  cp.iter = iter;
  cp.dev_eer = ComputeEer(values, is_target).eer;
  cp.dev_mindcf = ComputeMinDcf(values, is_target).min_dcf;
  return cp;
}

}  // namespace

ParamSet ParamSet::ZerosLike(const VaeModel &model) {
  return ConstantLike(model, 0.0);
}

ParamSet ParamSet::ConstantLike(const VaeModel &model, double value) {
  ParamSet p;
  auto blocks = Blocks(model);
  for (int b = 0; b < kNumBlocks; ++b)
    p.blocks[b] = Matrix::Constant(blocks[b]->rows(), blocks[b]->cols(), value);
  return p;
}

ParamSet &ParamSet::operator+=(const ParamSet &other) {
  for (int b = 0; b < kNumBlocks; ++b) blocks[b] += other.blocks[b];
  return *this;
}

ParamSet &ParamSet::operator*=(double s) {
  for (int b = 0; b < kNumBlocks; ++b) blocks[b] *= s;
  return *this;
}

ElboEstimate EstimateElbo(const Vector &x, const VaeModel &model,
                          const Matrix &eps, double beta) {
  if (eps.rows() < 1) throw InvalidInput("EstimateElbo needs K >= 1 draws");
  if (eps.cols() != model.config.d_h)
    throw ShapeError("eps rows must have length d_h");
  const InferenceOutput inf = InferForward(x, model.inf);
  ElboEstimate e;
  for (Eigen::Index k = 0; k < eps.rows(); ++k) {
    const Vector h = ReparamSample(inf.q, eps.row(k));
    e.recon += LogDensityDiag(x, GenForward(h, model.gen).p);
  }
  e.recon /= static_cast<double>(eps.rows());
  e.kl = KlToStandardNormal(inf.q);
  e.total = e.recon - beta * e.kl;
  return e;
}

GradientWorkspace AnalyticGradients(const Vector &x, const VaeModel &model,
                                    const Vector &eps, double beta) {
  const VaeConfig &cfg = model.config;
  if (x.size() != cfg.d_x) throw ShapeError("x must have length d_x");
  if (eps.size() != cfg.d_h) throw ShapeError("eps must have length d_h");
  const InferenceNet &inf = model.inf;
  const GenerativeNet &gen = model.gen;

  // Forward passes, keeping the precision pre-activations for the clamp mask.
  const InferenceOutput r = InferForward(x, inf);
  const Vector &y = r.y;
  const DiagGaussian &q = r.q;
  const Vector &mu_r = q.mean;
  const Vector &tau_r = q.precision;
  const Vector tau_r_pre = inf.tau.Apply(y);
  const Vector h = ReparamSample(q, eps);
  const GenerativeOutput g = GenForward(h, gen);
  const Vector &z = g.z;
  const Vector &mu_g = g.p.mean;
  const Vector &tau_g = g.p.precision;
  const Vector tau_g_pre = gen.tau.Apply(z);

  GradientWorkspace ws;
  ws.E_x = Vector::Ones(cfg.d_x);
  ws.E_h = Vector::Ones(cfg.d_h);
  ws.elbo.recon = LogDensityDiag(x, g.p);
  ws.elbo.kl = KlToStandardNormal(q);
  ws.elbo.total = ws.elbo.recon - beta * ws.elbo.kl;

  const Vector resid = x - mu_g;
  ws.A = resid.cwiseProduct(tau_g);
  ws.B = (0.5 * (ws.E_x - resid.cwiseProduct(ws.A)))
             .cwiseProduct(ClampMask(tau_g_pre));
  ws.C = Vector::Ones(cfg.d_d) - z.cwiseProduct(z);
  ws.T = Vector::Ones(cfg.d_d) - y.cwiseProduct(y);
  ws.G = ws.C.cwiseProduct(ws.B * gen.tau.Weights().transpose() +
                           ws.A * gen.mu.Weights().transpose());
  ws.S = ws.G * gen.v.Weights().transpose();
  ws.R = (0.5 * beta) * (tau_r.cwiseInverse() - ws.E_h);
  ws.F = -0.5 * tau_r.cwiseSqrt().cwiseInverse().cwiseProduct(eps);
  CheckFinite(ws.A, "A (gen.mu)");
  CheckFinite(ws.B, "B (gen.tau)");
  CheckFinite(ws.G, "G (gen.v)");
  CheckFinite(ws.S, "S");
  CheckFinite(ws.R, "R (inf.tau)");
  CheckFinite(ws.F, "F (inf.tau)");

  // Gradients w.r.t. the inference-net heads' pre-activations.
  const Vector d_mu_r = ws.S - beta * mu_r;
  const Vector d_tau_r =
      (ws.S.cwiseProduct(ws.F) + ws.R).cwiseProduct(ClampMask(tau_r_pre));
  const Vector d_y = (d_tau_r * inf.tau.Weights().transpose() +
                      d_mu_r * inf.mu.Weights().transpose())
                         .cwiseProduct(ws.T);

  const Vector z_t = Augment(z), h_t = Augment(h), y_t = Augment(y),
               x_t = Augment(x);
  ParamSet &gr = ws.grads;
  gr.blocks[kGenMu] = z_t.transpose() * ws.A;
  gr.blocks[kGenTau] = z_t.transpose() * ws.B;
  gr.blocks[kGenV] = h_t.transpose() * ws.G;
  gr.blocks[kInfMu] = y_t.transpose() * d_mu_r;
  gr.blocks[kInfTau] = y_t.transpose() * d_tau_r;
  gr.blocks[kInfV] = x_t.transpose() * d_y;
  for (int b = 0; b < kNumBlocks; ++b)
    if (!gr.blocks[b].allFinite())
      throw NumericError(std::string("non-finite gradient in block ") +
                         BlockName(b));
  return ws;
}

RmsPropState RmsPropState::Init(const VaeModel &model, double gamma,
                                double eta, double epsilon_stab) {
  RmsPropState s;
  s.ms = ParamSet::ConstantLike(model, 1.0);
  s.gamma = gamma;
  s.eta = eta;
  s.epsilon_stab = epsilon_stab;
  return s;
}

void RmsPropStep(VaeModel *model, const ParamSet &grads, RmsPropState *state) {
  auto params = Blocks(*model);
  for (int b = 0; b < kNumBlocks; ++b) {
    Matrix &p = *params[b];
    Matrix &ms = state->ms.blocks[b];
    const Matrix &g = grads.blocks[b];
    if (g.rows() != p.rows() || g.cols() != p.cols() || ms.rows() != p.rows() ||
        ms.cols() != p.cols())
      throw ShapeError(std::string("RmsPropStep: shape mismatch in block ") +
                       BlockName(b));
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const double gi = g(i, j);
        ms(i, j) = state->gamma * ms(i, j) + (1.0 - state->gamma) * gi * gi;
        p(i, j) += state->eta * gi / std::sqrt(ms(i, j) + state->epsilon_stab);
      }
    }
  }
}

void TrainReport::WriteCsv(std::ostream &os) const {
  os << "iter,elbo,dev_eer,dev_mindcf\n";
  std::size_t c = 0;
  for (int it = 0; it <= iterations; ++it) {
    const bool has_cp = c < checkpoints.size() && checkpoints[c].iter == it;
    if (it == 0 && !has_cp) continue;
    os << it << ',';
    if (it > 0) os << FormatDouble(elbo[it - 1]);
    os << ',';
    if (has_cp) {
      os << FormatDouble(checkpoints[c].dev_eer) << ','
         << FormatDouble(checkpoints[c].dev_mindcf);
      ++c;
    } else {
      os << ',';
    }
    os << '\n';
  }
}

FitResult Fit(const std::vector<Vector> &train_x,
              const std::optional<DevSet> &dev, const VaeConfig &config) {
  config.Validate();
  if (train_x.empty()) throw InvalidInput("Fit: empty training set");
  for (std::size_t i = 0; i < train_x.size(); ++i)
    if (train_x[i].size() != config.d_x)
      throw ShapeError("Fit: training vector " + std::to_string(i) +
                       " has dimension " + std::to_string(train_x[i].size()) +
                       ", expected d_x = " + std::to_string(config.d_x));

  FitResult result{InitParams(config), {}};
  VaeModel &model = result.model;
  TrainReport &report = result.report;
  RmsPropState state = RmsPropState::Init(model, config.gamma, config.eta);
  Rng rng(config.seed, /*stream=*/1);
  std::vector<std::size_t> order(train_x.size());
  std::iota(order.begin(), order.end(), 0);

  VaeModel best = model;
  double best_eer = std::numeric_limits<double>::infinity();
  int since_best = 0;
  report.stop_reason = "max-iters";

  // Returns true when training should stop.
  auto checkpoint = [&](int iter) {
    Checkpoint cp = Evaluate(model, *dev, iter);
    report.checkpoints.push_back(cp);
    if (cp.dev_eer < best_eer) {
      best_eer = cp.dev_eer;
      best = model;
      report.best_iter = iter;
      since_best = 0;
    } else {
      ++since_best;
    }
    // A zero EER cannot improve any further.
    if (best_eer == 0.0 || since_best >= config.patience) {
      report.stop_reason = "no-improvement";
      return true;
    }
    return false;
  };

  bool stopped = dev.has_value() && checkpoint(0);
  const std::size_t n = train_x.size();
  const double inv_k = 1.0 / config.k_train;
  for (int it = 1; it <= config.max_iters && !stopped; ++it) {
    if (config.max_iters >= 2 && it == config.max_iters / 2 + 1)
      state.eta *= 0.5;
    std::shuffle(order.begin(), order.end(), rng.engine());
    double elbo_sum = 0.0;
    int n_batches = 0;
    for (std::size_t start = 0; start < n; start += config.minibatch) {
      const std::size_t end = std::min(n, start + config.minibatch);
      ParamSet grads = ParamSet::ZerosLike(model);
      double batch_elbo = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        const Vector &x = train_x[order[b]];
        for (int k = 0; k < config.k_train; ++k) {
          GradientWorkspace ws = AnalyticGradients(
              x, model, rng.NormalVector(config.d_h), config.beta);
          grads += ws.grads;
          batch_elbo += ws.elbo.total;
        }
      }
      const double scale = inv_k / static_cast<double>(end - start);
      grads *= scale;
      RmsPropStep(&model, grads, &state);
      elbo_sum += batch_elbo * scale;
      ++n_batches;
    }
    report.elbo.push_back(elbo_sum / n_batches);
    report.iterations = it;
    if (dev.has_value() && it % config.eval_every == 0) stopped = checkpoint(it);
  }

  if (dev.has_value()) {
    model = best;
  } else {
    report.best_iter = report.iterations;
  }
  return result;
}

VaeConfig ParseTrainConfig(const KeyValues &kv, const std::string &source) {
  VaeConfig c;
  for (const auto &[key, value] : kv) {
    auto fail = [&](const std::string &why) -> void {
      throw FormatError(source + ": key '" + key + "': " + why);
    };
    std::size_t pos = 0;
    try {
      if (key == "d_x") c.d_x = std::stoi(value, &pos);
      else if (key == "d_d") c.d_d = std::stoi(value, &pos);
      else if (key == "d_h") c.d_h = std::stoi(value, &pos);
      else if (key == "beta") c.beta = std::stod(value, &pos);
      else if (key == "k_train") c.k_train = std::stoi(value, &pos);
      else if (key == "k_score") c.k_score = std::stoi(value, &pos);
      else if (key == "minibatch") c.minibatch = std::stoi(value, &pos);
      else if (key == "gamma") c.gamma = std::stod(value, &pos);
      else if (key == "eta") c.eta = std::stod(value, &pos);
      else if (key == "seed") c.seed = std::stoull(value, &pos);
      else if (key == "max_iters") c.max_iters = std::stoi(value, &pos);
      else if (key == "eval_every") c.eval_every = std::stoi(value, &pos);
      else if (key == "patience") c.patience = std::stoi(value, &pos);
      else fail("unknown key");
    } catch (const std::logic_error &) {
      fail("cannot parse value '" + value + "'");
    }
    if (pos != value.size()) fail("cannot parse value '" + value + "'");
  }
  try {
    c.Validate();
  } catch (const InvalidInput &e) {
    throw FormatError(source + ": " + e.what());
  }
  return c;
}

}  // namespace vaeverif
