// include/vaeverif/plda.h

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

#ifndef VAEVERIF_PLDA_H_
#define VAEVERIF_PLDA_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vaeverif/eval.h"
#include "vaeverif/io.h"
#include "vaeverif/types.h"

namespace vaeverif {

// Two-covariance model: speaker mean y ~ N(mu, B), session x ~ N(y, W).
// In diag mode both covariances are diagonal (stored as d x d matrices with
// zero off-diagonals).
struct PldaTwoCov {
  CovarianceMode mode = CovarianceMode::kDiag;
  Vector mu;
  Matrix b_cov;
  Matrix w_cov;

  int Dim() const { return static_cast<int>(mu.size()); }
};

/**
   EM estimate of (B, W) from speaker-labeled vectors, mu fixed at the
   global mean.  Initialized with B = W = total covariance / 2.

   E-step, per speaker s with n_s sessions and centered sum f_s:
     L_s = B^-1 + n_s W^-1,   y_s = L_s^-1 W^-1 f_s
   M-step:
     B = 1/S  sum_s (y_s y_s' + L_s^-1)
     W = 1/N  sum_s sum_i ((x_si - mu - y_s)(x_si - mu - y_s)' + L_s^-1)
   Diag mode keeps only the diagonals, which is the exact constrained
   M-step.  The data log-likelihood never decreases across iterations; pass
   `log_likelihood` to receive it before the first and after every update.

   Throws InvalidInput with fewer than 2 speakers, unlabeled vectors, or no
   speaker with two sessions ("insufficient within-speaker data");
   NumericError when a covariance becomes singular.
*/
PldaTwoCov FitTwoCov(const VectorSet &corpus, CovarianceMode mode,
                     int iters = 20,
                     std::vector<double> *log_likelihood = nullptr);

// Log-likelihood of the labeled corpus under `model`, speakers integrated
// out.
double TwoCovLogLikelihood(const VectorSet &corpus, const PldaTwoCov &model);

// Precomputed closed-form verification LLR
//   log N([x1 x2]; [mu mu], [[B+W, B], [B, B+W]])
//     - log N(x1; mu, B+W) - log N(x2; mu, B+W),
// evaluated per dimension in diag mode.  Exactly symmetric in (x1, x2).
class PldaScorer {
 public:
  explicit PldaScorer(const PldaTwoCov &model);
  double Llr(const Vector &x1, const Vector &x2) const;

 private:
  PldaTwoCov model_;
  // Full mode: LLR = c + x1'Q x1/2 + x2'Q x2/2 + x1'P x2 (centered inputs).
  // Diag mode uses the diagonals of the same quantities.
  Matrix q_, p_;
  double offset_ = 0.0;
};

double PldaLlr(const Vector &x1, const Vector &x2, const PldaTwoCov &model);

ScoreSet ScorePldaTrials(const TrialSet &trials, const VectorSet &vectors,
                         const PldaTwoCov &model);

// Diag-vs-full comparison: for each mode, optionally whiten with the
// matching pipeline (fitted on `train`), fit the PLDA, score `trials`.
struct ModeMetrics {
  CovarianceMode mode;
  std::optional<double> eer;      // empty when no labeled trials
  std::optional<double> min_dcf;
};

struct ComparisonOptions {
  bool whiten = true;
  bool length_norm = false;
  int iters = 20;
  CostParams costs;
};

std::vector<ModeMetrics> FullVsDiagReport(const VectorSet &train,
                                          const VectorSet &test,
                                          const TrialSet &trials,
                                          const ComparisonOptions &opts = {});

// Text format: header "vaeverif-plda v1", "mode diag|full", then blocks
// mu (1 x d), B and W (1 x d in diag mode, d x d in full mode).
void WritePlda(std::ostream &os, const PldaTwoCov &model);
PldaTwoCov ReadPlda(std::istream &is, const std::string &source);

}  // namespace vaeverif

#endif  // VAEVERIF_PLDA_H_
