// src/model.cc

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

#include "vaeverif/model.h"

#include <cmath>

#include "vaeverif/error.h"
#include "vaeverif/io.h"

namespace vaeverif {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)

void CheckLength(const Vector &v, Eigen::Index expected, const char *what) {
  if (v.size() != expected)
    throw ShapeError(std::string(what) + " has length " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(expected));
}

Vector Tanh(const Vector &a) { return a.array().tanh().matrix(); }

Vector ExpClamped(const Vector &a) {
  Vector out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out[i] = std::exp(ClampPrecisionPreactivation(a[i]));
  return out;
}

}  // namespace

void VaeConfig::Validate() const {
  if (d_x < 1 || d_d < 1 || d_h < 1)
    throw InvalidInput("VaeConfig: all layer dimensions must be >= 1");
  if (!(beta > 0.0)) throw InvalidInput("VaeConfig: beta must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw InvalidInput("VaeConfig: gamma must lie in [0, 1]");
  if (!(eta > 0.0)) throw InvalidInput("VaeConfig: eta must be > 0");
  if (k_train < 1 || k_score < 1)
    throw InvalidInput("VaeConfig: k_train and k_score must be >= 1");
  if (minibatch < 1) throw InvalidInput("VaeConfig: minibatch must be >= 1");
  if (max_iters < 0) throw InvalidInput("VaeConfig: max_iters must be >= 0");
  if (eval_every < 1 || patience < 1)
    throw InvalidInput("VaeConfig: eval_every and patience must be >= 1");
}

Vector AffineLayer::Apply(const Vector &x) const {
  const Eigen::Index in = InDim();
  CheckLength(x, in, "layer input");
  Vector out(OutDim());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < in; ++i) acc += x[i] * params_(i, j);
    acc += params_(in, j);
    out[j] = acc;
  }
  return out;
}

Vector AffineLayer::ApplyAugmented(const Vector &x_tilde) const {
  CheckLength(x_tilde, params_.rows(), "augmented layer input");
  Vector out(OutDim());
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x_tilde.size(); ++i)
      acc += x_tilde[i] * params_(i, j);
    out[j] = acc;
  }
  return out;
}

void DiagGaussian::Validate() const {
  if (mean.size() != precision.size())
    throw ShapeError("DiagGaussian: mean and precision lengths differ");
  for (Eigen::Index i = 0; i < precision.size(); ++i)
    if (!(precision[i] > 0.0))
      throw DomainError("DiagGaussian: precision must be positive");
}

bool VaeModel::operator==(const VaeModel &other) const {
  auto a = Blocks(*this);
  auto b = Blocks(other);
  for (int i = 0; i < kNumBlocks; ++i) {
    if (a[i]->rows() != b[i]->rows() || a[i]->cols() != b[i]->cols())
      return false;
    if (*a[i] != *b[i]) return false;
  }
  return true;
}

const char *BlockName(int block) {
  static const char *kNames[kNumBlocks] = {
      "gen.v.Wtilde", "gen.mu.Wtilde", "gen.tau.Wtilde",
      "inf.v.Wtilde", "inf.mu.Wtilde", "inf.tau.Wtilde"};
  return kNames[block];
}

std::array<Matrix *, kNumBlocks> Blocks(VaeModel &m) {
  return {&m.gen.v.Augmented(), &m.gen.mu.Augmented(), &m.gen.tau.Augmented(),
          &m.inf.v.Augmented(), &m.inf.mu.Augmented(), &m.inf.tau.Augmented()};
}

std::array<const Matrix *, kNumBlocks> Blocks(const VaeModel &m) {
  return {&m.gen.v.Augmented(), &m.gen.mu.Augmented(), &m.gen.tau.Augmented(),
          &m.inf.v.Augmented(), &m.inf.mu.Augmented(), &m.inf.tau.Augmented()};
}

double ClampPrecisionPreactivation(double a) {
  if (a > kPrecisionClamp) return kPrecisionClamp;
  if (a < -kPrecisionClamp) return -kPrecisionClamp;
  return a;
}

InferenceOutput InferForward(const Vector &x, const InferenceNet &inf) {
  InferenceOutput out;
  out.y = Tanh(inf.v.Apply(x));
  out.q.mean = inf.mu.Apply(out.y);
  out.q.precision = ExpClamped(inf.tau.Apply(out.y));
  return out;
}

GenerativeOutput GenForward(const Vector &h, const GenerativeNet &gen) {
  GenerativeOutput out;
  out.z = Tanh(gen.v.Apply(h));
  out.p.mean = gen.mu.Apply(out.z);
  out.p.precision = ExpClamped(gen.tau.Apply(out.z));
  return out;
}

Vector ReparamSample(const DiagGaussian &q, const Vector &eps) {
  q.Validate();
  CheckLength(eps, q.Dim(), "eps");
  Vector h(q.Dim());
  for (Eigen::Index i = 0; i < h.size(); ++i)
    h[i] = q.mean[i] + eps[i] / std::sqrt(q.precision[i]);
  return h;
}

double LogDensityDiag(const Vector &x, const DiagGaussian &p) {
  p.Validate();
  CheckLength(x, p.Dim(), "x");
  double acc = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double r = x[j] - p.mean[j];
    acc += std::log(p.precision[j]) - kLog2Pi - p.precision[j] * r * r;
  }
  return 0.5 * acc;
}

double KlToStandardNormal(const DiagGaussian &q) {
  q.Validate();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < q.Dim(); ++j) {
    const double tau = q.precision[j];
    acc += q.mean[j] * q.mean[j] + 1.0 / tau - 1.0 + std::log(tau);
  }
  return 0.5 * acc;
}

VaeModel InitParams(const VaeConfig &config, std::uint64_t seed) {
  config.Validate();
  VaeModel model;
  model.config = config;
  model.gen = {AffineLayer(config.d_h, config.d_d),
               AffineLayer(config.d_d, config.d_x),
               AffineLayer(config.d_d, config.d_x)};
  model.inf = {AffineLayer(config.d_x, config.d_d),
               AffineLayer(config.d_d, config.d_h),
               AffineLayer(config.d_d, config.d_h)};
  Rng rng(seed);
  auto fill = [&rng](AffineLayer &layer, double scale) {
    const double a =
        std::sqrt(6.0 / static_cast<double>(layer.InDim() + layer.OutDim()));
    for (Eigen::Index j = 0; j < layer.OutDim(); ++j)
      for (Eigen::Index i = 0; i < layer.InDim(); ++i)
        layer.Augmented()(i, j) = scale * rng.Uniform(-a, a);
  };
  fill(model.gen.v, 1.0);
  fill(model.gen.mu, 1.0);
  fill(model.gen.tau, 0.01);
  fill(model.inf.v, 1.0);
  fill(model.inf.mu, 1.0);
  fill(model.inf.tau, 0.01);
  return model;
}

void WriteModel(std::ostream &os, const VaeModel &model) {
  os << "vaeverif-model v1\n";
  os << "dims " << model.config.d_x << ' ' << model.config.d_d << ' '
     << model.config.d_h << '\n';
  auto blocks = Blocks(model);
  for (int b = 0; b < kNumBlocks; ++b) WriteBlock(os, BlockName(b), *blocks[b]);
}

VaeModel ReadModel(std::istream &is, const std::string &source) {
  LineReader reader(is, source);
  ExpectHeader(reader, "vaeverif-model v1");
  std::vector<std::string> toks = reader.ExpectTokens("'dims d_x d_d d_h'");
  if (toks.size() != 4 || toks[0] != "dims")
    reader.Fail("expected 'dims d_x d_d d_h'");
  VaeModel model;
  model.config.d_x = static_cast<int>(reader.ParseInt(toks[1]));
  model.config.d_d = static_cast<int>(reader.ParseInt(toks[2]));
  model.config.d_h = static_cast<int>(reader.ParseInt(toks[3]));
  const int dx = model.config.d_x, dd = model.config.d_d, dh = model.config.d_h;
  if (dx < 1 || dd < 1 || dh < 1) reader.Fail("dimensions must be >= 1");
  const int shapes[kNumBlocks][2] = {{dh + 1, dd}, {dd + 1, dx}, {dd + 1, dx},
                                     {dx + 1, dd}, {dd + 1, dh}, {dd + 1, dh}};
  auto blocks = Blocks(model);
  for (int b = 0; b < kNumBlocks; ++b) {
    *blocks[b] = ReadBlock(reader, BlockName(b), shapes[b][0], shapes[b][1]);
    if (!blocks[b]->allFinite())
      reader.Fail(std::string("non-finite value in block ") + BlockName(b));
  }
  if (reader.NextTokens(&toks)) reader.Fail("trailing data after model");
  return model;
}

void WriteModelFile(const std::string &path, const VaeModel &model) {
  std::ofstream os = OpenOutput(path);
  WriteModel(os, model);
}

VaeModel ReadModelFile(const std::string &path) {
  std::ifstream is = OpenInput(path);
  return ReadModel(is, path);
}

}  // namespace vaeverif
