// src/scoring.cc

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

#include "vaeverif/scoring.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vaeverif/error.h"

namespace vaeverif {

namespace {

void CheckWeight(double w) {
  if (!std::isfinite(w))
    throw NumericError("non-finite importance weight");
}

Matrix DrawEps(int k, int d_h, std::uint64_t seed) {
  if (k < 1) throw InvalidInput("number of importance samples must be >= 1");
  Rng rng(seed);
  Matrix eps(k, d_h);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d_h; ++j) eps(i, j) = rng.Normal();
  return eps;
}

// Draws h_k from q(h|proposal_x) and returns, per draw,
//   self[k]  = log p(proposal_x|h_k) + log p(h_k) - log q(h_k|proposal_x)
//   other[k] = log p(other_x|h_k)          (only when other_x is given)
struct ProposalWeights {
  std::vector<double> self;
  std::vector<double> other;
};

ProposalWeights Weigh(const Vector &proposal_x, const Vector *other_x,
                      const VaeModel &model, const Matrix &eps) {
  if (eps.rows() < 1) throw InvalidInput("need at least one eps draw");
  if (eps.cols() != model.config.d_h)
    throw ShapeError("eps rows must have length d_h");
  const InferenceOutput inf = InferForward(proposal_x, model.inf);
  const DiagGaussian prior{Vector::Zero(model.config.d_h),
                           Vector::Ones(model.config.d_h)};
  ProposalWeights pw;
  pw.self.resize(eps.rows());
  if (other_x != nullptr) pw.other.resize(eps.rows());
  for (Eigen::Index k = 0; k < eps.rows(); ++k) {
    const Vector h = ReparamSample(inf.q, eps.row(k));
    const GenerativeOutput gen = GenForward(h, model.gen);
    const double w = LogDensityDiag(proposal_x, gen.p) +
                     (LogDensityDiag(h, prior) - LogDensityDiag(h, inf.q));
    CheckWeight(w);
    pw.self[k] = w;
    if (other_x != nullptr) {
      pw.other[k] = LogDensityDiag(*other_x, gen.p);
      CheckWeight(pw.other[k]);
    }
  }
  return pw;
}

// log P(test, enroll) - log P(test) - log P(enroll) with the joint proposal
// q(h|enroll).  Written as
//   log sum_k exp(lt_k - log P(test) + we_k) - log sum_k exp(we_k)
// where we_k are the enrollment weights and lt_k = log p(test|h_k); the
// 1/K factors cancel and a likelihood that is constant in h gives exactly 0.
double AsymmetricLlr(const Vector &x_test, const Vector &x_enroll,
                     const VaeModel &model, const Matrix &eps) {
  const double log_p_test =
      LogMeanExp(Weigh(x_test, nullptr, model, eps).self);
  ProposalWeights pw = Weigh(x_enroll, &x_test, model, eps);
  std::vector<double> joint(pw.self.size());
  for (std::size_t k = 0; k < joint.size(); ++k)
    joint[k] = (pw.other[k] - log_p_test) + pw.self[k];
  return LogMeanExp(joint) - LogMeanExp(pw.self);
}

}  // namespace

double LogMeanExp(std::span<const double> w) {
  if (w.empty()) throw InvalidInput("LogMeanExp of an empty sequence");
  const double m = *std::max_element(w.begin(), w.end());
  if (std::isinf(m)) return m;
  double acc = 0.0;
  for (double v : w) acc += std::exp(v - m);
  return m + std::log(acc / static_cast<double>(w.size()));
}

double LogMarginalWithEps(const Vector &x, const VaeModel &model,
                          const Matrix &eps) {
  return LogMeanExp(Weigh(x, nullptr, model, eps).self);
}

double LogJointMarginalWithEps(const Vector &x1, const Vector &x2,
                               const VaeModel &model, const Matrix &eps) {
  ProposalWeights pw = Weigh(x2, &x1, model, eps);
  std::vector<double> w(pw.self.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = pw.other[k] + pw.self[k];
  return LogMeanExp(w);
}

double LogMarginal(const Vector &x, const VaeModel &model, int k,
                   std::uint64_t seed) {
  return LogMarginalWithEps(x, model, DrawEps(k, model.config.d_h, seed));
}

double LogJointMarginal(const Vector &x1, const Vector &x2,
                        const VaeModel &model, int k, std::uint64_t seed) {
  return LogJointMarginalWithEps(x1, x2, model,
                                 DrawEps(k, model.config.d_h, seed));
}

double Llr(const Vector &x_test, const Vector &x_enroll, const VaeModel &model,
           int k, std::uint64_t seed, bool symmetric) {
  const Matrix eps = DrawEps(k, model.config.d_h, seed);
  double llr = AsymmetricLlr(x_test, x_enroll, model, eps);
  if (symmetric) {
    // (P(t,e) + P(e,t)) / 2 divided by P(t) P(e) is the mean of the two
    // likelihood ratios.  0.5 * (1 + 1) == 1, so equal ratios come back
    // unchanged.
    const double other = AsymmetricLlr(x_enroll, x_test, model, eps);
    const double m = std::max(llr, other);
    llr = m + std::log(0.5 * (std::exp(llr - m) + std::exp(other - m)));
  }
  if (!std::isfinite(llr)) throw NumericError("non-finite LLR");
  return llr;
}

std::uint64_t TrialSeed(std::uint64_t seed, const Trial &trial) {
  // FNV-1a over "enroll\ttest", then mixed with the base seed (splitmix64).
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const std::string &s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  feed(trial.enroll_id);
  feed("\t");
  feed(trial.test_id);
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ScoreSet ScoreTrials(const TrialSet &trials, const VectorSet &vectors,
                     const VaeModel &model, int k, std::uint64_t seed,
                     bool symmetric) {
  ScoreSet scores;
  scores.reserve(trials.size());
  for (const Trial &t : trials) {
    const Vector &enroll = vectors.Get(t.enroll_id);
    const Vector &test = vectors.Get(t.test_id);
    ScoredTrial s;
    s.trial = t;
    s.score = Llr(test, enroll, model, k, TrialSeed(seed, t), symmetric);
    s.k_used = k;
    scores.push_back(std::move(s));
  }
  return scores;
}

}  // namespace vaeverif
