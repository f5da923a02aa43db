// include/vaeverif/model.h

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

#ifndef VAEVERIF_MODEL_H_
#define VAEVERIF_MODEL_H_

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "vaeverif/types.h"

namespace vaeverif {

// Hyperparameters of a diagonal VAE with one deterministic and one
// stochastic layer per net.
struct VaeConfig {
  int d_x = 10;         // input dimension
  int d_d = 20;         // deterministic (tanh) layer
  int d_h = 10;         // stochastic layer
  double beta = 1.0;    // KL weight
  int k_train = 1;      // eps draws per example per step
  int k_score = 100;    // importance samples per marginal when scoring
  int minibatch = 100;
  double gamma = 0.9;   // RMS-prop smoothing; 1 switches RMS-prop off
  double eta = 1e-6;    // learning rate
  std::uint64_t seed = 1;
  int max_iters = 100;  // epochs
  int eval_every = 1;   // epochs between dev checkpoints
  int patience = 3;     // checkpoints without EER improvement before stopping

  // Throws InvalidInput on dimension < 1, beta <= 0, gamma outside [0,1],
  // eta <= 0, or non-positive sample/batch counts.
  void Validate() const;
};

// Affine map stored in augmented form W~ = [W; b] ((in + 1) x out), so that
// [x 1] W~ == x W + b.
class AffineLayer {
 public:
  AffineLayer() = default;
  AffineLayer(int in_dim, int out_dim) : params_(Matrix::Zero(in_dim + 1, out_dim)) {}
  explicit AffineLayer(Matrix augmented) : params_(std::move(augmented)) {}

  int InDim() const { return static_cast<int>(params_.rows()) - 1; }
  int OutDim() const { return static_cast<int>(params_.cols()); }

  auto Weights() { return params_.topRows(params_.rows() - 1); }
  auto Weights() const { return params_.topRows(params_.rows() - 1); }
  auto Bias() { return params_.bottomRows(1); }
  auto Bias() const { return params_.bottomRows(1); }

  Matrix &Augmented() { return params_; }
  const Matrix &Augmented() const { return params_; }

  // x W + b, summed left to right with the bias added last.  Throws
  // ShapeError when x has the wrong length.
  Vector Apply(const Vector &x) const;
  // [x 1] W~ with the same summation order; bitwise equal to Apply(x).
  Vector ApplyAugmented(const Vector &x_tilde) const;

 private:
  Matrix params_;
};

// Diagonal Gaussian as (mean, precision).
struct DiagGaussian {
  Vector mean;
  Vector precision;

  Eigen::Index Dim() const { return mean.size(); }
  // Throws ShapeError on length mismatch, DomainError on precision <= 0.
  void Validate() const;
};

// Generative net (theta): h -> z = tanh(h Wv + bv) -> (mu_g, tau_g).
struct GenerativeNet {
  AffineLayer v, mu, tau;
};

// Inference net (phi): x -> y = tanh(x Wv + bv) -> (mu_r, tau_r).
struct InferenceNet {
  AffineLayer v, mu, tau;
};

struct VaeModel {
  VaeConfig config;
  GenerativeNet gen;
  InferenceNet inf;

  bool operator==(const VaeModel &other) const;
};

// The six parameter blocks, in the order used by gradients, optimizer state
// and the model file.
enum ParamBlock { kGenV = 0, kGenMu, kGenTau, kInfV, kInfMu, kInfTau };
inline constexpr int kNumBlocks = 6;
const char *BlockName(int block);  // "gen.v.Wtilde", ...

std::array<Matrix *, kNumBlocks> Blocks(VaeModel &model);
std::array<const Matrix *, kNumBlocks> Blocks(const VaeModel &model);

// Precision pre-activations are clamped to this range before exp().
inline constexpr double kPrecisionClamp = 30.0;
double ClampPrecisionPreactivation(double a);

struct InferenceOutput {
  Vector y;        // deterministic layer
  DiagGaussian q;  // q(h|x)
};

struct GenerativeOutput {
  Vector z;        // deterministic layer
  DiagGaussian p;  // p(x|h)
};

InferenceOutput InferForward(const Vector &x, const InferenceNet &inf);
GenerativeOutput GenForward(const Vector &h, const GenerativeNet &gen);

// h = mean + precision^(-1/2) .* eps
Vector ReparamSample(const DiagGaussian &q, const Vector &eps);

// 1/2 sum_j [ln tau_j - ln 2pi - tau_j (x_j - mu_j)^2]
double LogDensityDiag(const Vector &x, const DiagGaussian &p);

// KL(q || N(0, I)) = 1/2 sum_j [mu_j^2 + 1/tau_j - 1 + ln tau_j]
double KlToStandardNormal(const DiagGaussian &q);

// Glorot-uniform weights, zero biases, precision-head weights damped by 0.01.
VaeModel InitParams(const VaeConfig &config, std::uint64_t seed);
inline VaeModel InitParams(const VaeConfig &config) {
  return InitParams(config, config.seed);
}

// Text format:
//   vaeverif-model v1
//   dims d_x d_d d_h
//   gen.v.Wtilde rows cols
//   ...
// six augmented blocks, values with 17 significant digits.  Only the
// dimensions of the config are stored; other fields take default values on
// reading.
void WriteModel(std::ostream &os, const VaeModel &model);
VaeModel ReadModel(std::istream &is, const std::string &source);
void WriteModelFile(const std::string &path, const VaeModel &model);
VaeModel ReadModelFile(const std::string &path);

}  // namespace vaeverif

#endif  // VAEVERIF_MODEL_H_
