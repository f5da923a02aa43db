// include/vaeverif/synth.h

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

#ifndef VAEVERIF_SYNTH_H_
#define VAEVERIF_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "vaeverif/io.h"
#include "vaeverif/model.h"
#include "vaeverif/types.h"

namespace vaeverif {

// Two-covariance speaker corpus: y_s ~ N(0, B), x ~ N(y_s, W).  Training,
// dev and test speakers are disjoint.  Dev and test trial lists hold
// `n_trials` target and `n_trials` impostor pairs each (fewer targets when
// the speaker pool cannot supply that many distinct pairs).
struct CorpusSpec {
  int n_speakers = 100;           // training speakers
  int sessions_per_speaker = 10;
  int dim = 10;
  Matrix b_cov;                   // d x d; PSD (B = 0 is allowed)
  Matrix w_cov;                   // d x d; PD
  int n_dev_speakers = 0;
  int n_test_speakers = 100;
  int n_trials = 1000;            // per class, per split
  std::uint64_t seed = 1;

  void Validate() const;
};

struct SyntheticCorpus {
  VectorSet train, dev, test;
  TrialSet dev_trials, test_trials;
};

/**
   Draws the corpus.  Speaker ids are "spkNNNNN" (numbered across all three
   splits), vector ids "spkNNNNN-SS".  Targets are distinct same-speaker
   session pairs, impostors pair sessions of different speakers; both lists
   are picked by a seeded shuffle and then interleaved.  Throws InvalidInput
   ("no target pairs") when a split with speakers has fewer than two
   sessions per speaker.
*/
SyntheticCorpus GenTwoCovCorpus(const CorpusSpec &spec);

// Reads a key=value corpus description, e.g.
//   n_speakers = 2000
//   b_diag = 1            (one value broadcast, or `dim` values)
//   w_diag = 0.5 0.5 ...
//   w_corr = 0.8          (optional: W_ij = rho sqrt(w_i w_j) off diagonal)
CorpusSpec ParseCorpusSpec(const KeyValues &kv, const std::string &source);

// ---------------------------------------------------------------------------
// 2-D cluster data: centers ~ N(0, spread^2 I), points ~ N(center, within).

struct ClusterSpec {
  int n_clusters = 10;
  int points_per_cluster = 100;
  double cluster_spread = 5.0;
  Matrix within_cov = Matrix::Identity(2, 2);
  std::uint64_t seed = 1;

  void Validate() const;
};

struct ClusterData {
  std::vector<Vector> points;
  std::vector<int> labels;        // cluster index per point
  std::vector<Vector> centers;
};

ClusterData GenCluster2d(const ClusterSpec &spec);

// n draws of h ~ N(0, I), x ~ p(x | h).
std::vector<Vector> SampleGenerative(const VaeModel &model, int n,
                                     std::uint64_t seed);

// Fraction of `centers` with at least one of `samples` within `radius`.
double CaptureFraction(const std::vector<Vector> &centers,
                       const std::vector<Vector> &samples, double radius);

// Capture fraction of n_gen samples from a 2-D model.  ShapeError unless
// the model's d_x is 2.
double CaptureScore(const ClusterData &data, const VaeModel &model, int n_gen,
                    double radius, std::uint64_t seed);

// 2 sqrt(largest eigenvalue of within_cov).
double DefaultCaptureRadius(const ClusterSpec &spec);

}  // namespace vaeverif

#endif  // VAEVERIF_SYNTH_H_
