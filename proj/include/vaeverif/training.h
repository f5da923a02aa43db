// include/vaeverif/training.h

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

#ifndef VAEVERIF_TRAINING_H_
#define VAEVERIF_TRAINING_H_

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vaeverif/io.h"
#include "vaeverif/model.h"

namespace vaeverif {

// Parameter-shaped tensors, one per block in ParamBlock order.  Used for
// gradients and for the RMS-prop accumulators.
struct ParamSet {
  std::array<Matrix, kNumBlocks> blocks;

  static ParamSet ZerosLike(const VaeModel &model);
  static ParamSet ConstantLike(const VaeModel &model, double value);
  ParamSet &operator+=(const ParamSet &other);
  ParamSet &operator*=(double s);
};

struct ElboEstimate {
  double total = 0.0;  // recon - beta * kl
  double recon = 0.0;  // Monte-Carlo estimate of E_q[log p(x|h)]
  double kl = 0.0;     // analytic KL(q(h|x) || N(0, I))
};

// Reparametrized estimate with one draw per row of `eps` (K x d_h).
ElboEstimate EstimateElbo(const Vector &x, const VaeModel &model,
                          const Matrix &eps, double beta);

/**
   Intermediates of the single-sample (K = 1) analytic gradient of the
   beta-weighted lower bound, plus the resulting block gradients.

     A = (x - mu_g) .* tau_g                 d_x
     B = 1/2 [E_x - (x - mu_g) .* A]         d_x
     C = 1 - z .* z                          d_d
     T = 1 - y .* y                          d_d
     G = C .* (B Wtau_g' + A Wmu_g')         d_d
     S = G Wv_g'                             d_h
     R = beta/2 [tau_r^-1 - E_h]             d_h
     F = -1/2 tau_r^-1/2 .* eps              d_h

   and, with ~ denoting the augmented [v 1] row,

     dL/dWmu_g~  = z~' A
     dL/dWtau_g~ = z~' B
     dL/dWv_g~   = h~' G
     dL/dWmu_r~  = y~' (S - beta mu_r)
     dL/dWtau_r~ = y~' (S .* F + R)
     dL/dWv_r~   = x~' {([S .* F] Wtau_r' + S Wmu_r' + R Wtau_r'
                          - beta mu_r Wmu_r') .* T}

   These are ascent directions.  Where a precision pre-activation sits at
   the clamp the corresponding entries of B and (S .* F + R) are zeroed,
   matching the derivative of the clamped forward pass.
*/
struct GradientWorkspace {
  Vector A, B, C, T, G, S, R, F;
  Vector E_x, E_h;
  ParamSet grads;
  ElboEstimate elbo;  // fixed-eps value at which the gradient was taken
};

// Throws NumericError naming the block when any intermediate or gradient is
// non-finite.
GradientWorkspace AnalyticGradients(const Vector &x, const VaeModel &model,
                                    const Vector &eps, double beta);

struct RmsPropState {
  ParamSet ms;  // smoothed squared gradients, >= 0
  double gamma = 0.9;
  double eta = 1e-6;
  double epsilon_stab = 1e-8;

  // ms starts at all-ones so that gamma = 1 reduces to plain SGD.
  static RmsPropState Init(const VaeModel &model, double gamma, double eta,
                           double epsilon_stab = 1e-8);
};

// ms' = gamma ms + (1 - gamma) g^2;  psi' = psi + eta g / sqrt(ms' + eps).
void RmsPropStep(VaeModel *model, const ParamSet &grads, RmsPropState *state);

struct Checkpoint {
  int iter = 0;
  double dev_eer = 0.0;
  double dev_mindcf = 0.0;
};

struct TrainReport {
  std::vector<double> elbo;  // mean minibatch ELBO of each epoch
  std::vector<Checkpoint> checkpoints;
  std::string stop_reason;   // "max-iters" or "no-improvement"
  int iterations = 0;        // epochs actually run
  int best_iter = 0;         // epoch of the returned model

  // iter,elbo,dev_eer,dev_mindcf; dev columns empty off-checkpoint.
  void WriteCsv(std::ostream &os) const;
};

struct DevSet {
  VectorSet vectors;
  TrialSet trials;
};

struct FitResult {
  VaeModel model;
  TrainReport report;
};

/**
   Trains a VAE with minibatch RMS-prop.  One iteration is one epoch over
   the shuffled training set.  The learning rate is halved once after
   max_iters / 2 epochs.  With a dev set the initial model is scored as
   checkpoint 0 and again every eval_every epochs; training stops once the
   dev EER fails to improve for `patience` consecutive checkpoints (or
   reaches zero), and the best checkpoint is returned.
*/
FitResult Fit(const std::vector<Vector> &train_x,
              const std::optional<DevSet> &dev, const VaeConfig &config);

// Reads the flat key=value training config.  Unknown keys are a FormatError.
VaeConfig ParseTrainConfig(const KeyValues &kv, const std::string &source);

}  // namespace vaeverif

#endif  // VAEVERIF_TRAINING_H_
