// include/vaeverif/scoring.h

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

#ifndef VAEVERIF_SCORING_H_
#define VAEVERIF_SCORING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "vaeverif/io.h"
#include "vaeverif/model.h"

namespace vaeverif {

// log((1/K) sum_k exp(w_k)), shifted by max(w) before exponentiating.
double LogMeanExp(std::span<const double> w);

// Importance-sampling estimates with q(h|x) as the proposal.  The eps rows
// (K x d_h) are mapped through the reparametrization of the proposal; the
// proposal density is evaluated analytically at each draw.
double LogMarginalWithEps(const Vector &x, const VaeModel &model,
                          const Matrix &eps);
// Joint p(x1, x2) with proposal q(h|x2); x2 is the enrollment side.
double LogJointMarginalWithEps(const Vector &x1, const Vector &x2,
                               const VaeModel &model, const Matrix &eps);

// Same estimates drawing K standard-normal rows from `seed`.
double LogMarginal(const Vector &x, const VaeModel &model, int k,
                   std::uint64_t seed);
double LogJointMarginal(const Vector &x1, const Vector &x2,
                        const VaeModel &model, int k, std::uint64_t seed);

/**
   Verification log-likelihood ratio

     log P(x_test, x_enroll) - log P(x_test) - log P(x_enroll)

   with the joint proposal taken from the enrollment vector.  The symmetric
   variant replaces the joint term by log((P(t, e) + P(e, t)) / 2), averaging
   the two proposal choices in the probability domain.  All marginals share
   one set of K eps draws generated from `seed`.
*/
double Llr(const Vector &x_test, const Vector &x_enroll, const VaeModel &model,
           int k, std::uint64_t seed, bool symmetric = false);

// Seed of the RNG stream for one trial: a function of the base seed and the
// (enroll, test) ids only, so scores do not depend on trial order.
std::uint64_t TrialSeed(std::uint64_t seed, const Trial &trial);

// One LLR per trial, enrollment vector fed to the inference net.  Throws
// LookupError naming any id missing from `vectors`.
ScoreSet ScoreTrials(const TrialSet &trials, const VectorSet &vectors,
                     const VaeModel &model, int k, std::uint64_t seed,
                     bool symmetric = false);

}  // namespace vaeverif

#endif  // VAEVERIF_SCORING_H_
