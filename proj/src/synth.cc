// src/synth.cc

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

#include "vaeverif/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <utility>

#include "vaeverif/error.h"

namespace vaeverif {

namespace {

// Symmetric square root S with S S = m; tiny negative eigenvalues of a PSD
// input are treated as zero.
Matrix SqrtPsd(const Matrix &m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success)
    throw NumericError("eigendecomposition failed");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

void CheckCovariance(const Matrix &m, int dim, const std::string &name,
                     bool allow_singular) {
  if (m.rows() != dim || m.cols() != dim)
    throw ShapeError(name + " must be " + std::to_string(dim) + " x " +
                     std::to_string(dim));
  if (!m.allFinite()) throw InvalidInput(name + " has non-finite entries");
  if (!m.isApprox(m.transpose(), 1e-12) && (m - m.transpose()).norm() > 0.0)
    throw InvalidInput(name + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const double lmin = eig.eigenvalues().minCoeff();
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (allow_singular ? lmin < -1e-12 * scale : !(lmin > 0.0))
    throw InvalidInput(name + (allow_singular ? " is not PSD" : " is not PD"));
}

std::string SpeakerId(int s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%05d", s);
  return buf;
}

std::string SessionId(int s, int j) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "spk%05d-%02d", s, j);
  return buf;
}

// Balanced trials over one split.  `first` is the global index of the
// split's first speaker.
TrialSet MakeTrials(const VectorSet &set, int n_speakers, int sessions,
                    int first, int n_trials, Rng *rng) {
  TrialSet trials;
  if (n_speakers == 0 || n_trials == 0) return trials;
  std::vector<std::pair<int, int>> targets;  // indices into set
  for (int s = 0; s < n_speakers; ++s)
    for (int a = 0; a < sessions; ++a)
      for (int b = a + 1; b < sessions; ++b)
        targets.emplace_back(s * sessions + a, s * sessions + b);
  if (targets.empty())
    throw InvalidInput("no target pairs: speakers " + SpeakerId(first) +
                       ".. have fewer than 2 sessions");
  if (n_speakers < 2)
    throw InvalidInput("impostor trials need at least 2 speakers in a split");
  std::shuffle(targets.begin(), targets.end(), rng->engine());
  const std::size_t n = std::min<std::size_t>(n_trials, targets.size());
  targets.resize(n);

  const long total = static_cast<long>(set.size());
  const long max_impostors =
      total * (total - 1) / 2 -
      static_cast<long>(n_speakers) * sessions * (sessions - 1) / 2;
  const std::size_t n_non = std::min<std::size_t>(n, max_impostors);
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> impostors;
  while (impostors.size() < n_non) {
    int a = static_cast<int>(rng->Index(set.size()));
    int b = static_cast<int>(rng->Index(set.size()));
    if (a / sessions == b / sessions) continue;
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) continue;
    impostors.emplace_back(a, b);
  }

  for (std::size_t i = 0; i < std::max(n, n_non); ++i) {
    if (i < n)
      trials.push_back({set.ids[targets[i].first], set.ids[targets[i].second],
                        TrialLabel::kTarget});
    if (i < n_non)
      trials.push_back({set.ids[impostors[i].first],
                        set.ids[impostors[i].second], TrialLabel::kImpostor});
  }
  return trials;
}

std::vector<double> ParseList(const std::string &value, const std::string &key,
                              const std::string &source) {
  std::istringstream ss(value);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used != tok.size())
      throw FormatError(source + ": " + key + ": bad number '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw FormatError(source + ": " + key + ": empty value");
  return out;
}

}  // namespace

void CorpusSpec::Validate() const {
  if (n_speakers < 1 || sessions_per_speaker < 1 || dim < 1)
    throw InvalidInput("corpus spec: counts must be positive");
  if (n_dev_speakers < 0 || n_test_speakers < 0 || n_trials < 0)
    throw InvalidInput("corpus spec: counts must be non-negative");
  CheckCovariance(b_cov, dim, "b_cov", true);
  CheckCovariance(w_cov, dim, "w_cov", false);
}

SyntheticCorpus GenTwoCovCorpus(const CorpusSpec &spec) {
  spec.Validate();
  const Matrix b_root = SqrtPsd(spec.b_cov), w_root = SqrtPsd(spec.w_cov);
  Rng rng(spec.seed, 0);
  SyntheticCorpus corpus;
  corpus.train.dim = corpus.dev.dim = corpus.test.dim = spec.dim;

  const int splits[3] = {spec.n_speakers, spec.n_dev_speakers,
                         spec.n_test_speakers};
  VectorSet *sets[3] = {&corpus.train, &corpus.dev, &corpus.test};
  int speaker = 0;
  for (int k = 0; k < 3; ++k) {
    for (int s = 0; s < splits[k]; ++s, ++speaker) {
      const Vector y = rng.NormalVector(spec.dim) * b_root;
      for (int j = 0; j < spec.sessions_per_speaker; ++j) {
        Vector x = y + rng.NormalVector(spec.dim) * w_root;
        sets[k]->Add(SessionId(speaker, j), SpeakerId(speaker), std::move(x));
      }
    }
  }

  Rng dev_rng(spec.seed, 2), test_rng(spec.seed, 3);
  corpus.dev_trials =
      MakeTrials(corpus.dev, spec.n_dev_speakers, spec.sessions_per_speaker,
                 spec.n_speakers, spec.n_trials, &dev_rng);
  corpus.test_trials = MakeTrials(
      corpus.test, spec.n_test_speakers, spec.sessions_per_speaker,
      spec.n_speakers + spec.n_dev_speakers, spec.n_trials, &test_rng);
  return corpus;
}

CorpusSpec ParseCorpusSpec(const KeyValues &kv, const std::string &source) {
  CorpusSpec spec;
  auto get_int = [&](const std::string &key, int *out) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    const std::vector<double> v = ParseList(it->second, key, source);
    if (v.size() != 1 || v[0] != std::floor(v[0]))
      throw FormatError(source + ": " + key + " must be an integer");
    *out = static_cast<int>(v[0]);
  };
  static const std::set<std::string> known = {
      "n_speakers", "sessions_per_speaker", "dim",    "n_dev_speakers",
      "n_test_speakers", "n_trials",        "seed",   "b_diag",
      "w_diag",     "b_corr",               "w_corr"};
  for (const auto &[key, value] : kv)
    if (!known.count(key))
      throw FormatError(source + ": unknown key '" + key + "'");
  get_int("n_speakers", &spec.n_speakers);
  get_int("sessions_per_speaker", &spec.sessions_per_speaker);
  get_int("dim", &spec.dim);
  get_int("n_dev_speakers", &spec.n_dev_speakers);
  get_int("n_test_speakers", &spec.n_test_speakers);
  get_int("n_trials", &spec.n_trials);
  int seed = 1;
  get_int("seed", &seed);
  if (seed < 0) throw FormatError(source + ": seed must be >= 0");
  spec.seed = static_cast<std::uint64_t>(seed);
  if (spec.dim < 1) throw FormatError(source + ": dim must be positive");

  auto build = [&](const std::string &diag_key, const std::string &corr_key) {
    Eigen::VectorXd var = Eigen::VectorXd::Ones(spec.dim);
    auto it = kv.find(diag_key);
    if (it != kv.end()) {
      const std::vector<double> v = ParseList(it->second, diag_key, source);
      if (v.size() == 1) {
        var.setConstant(v[0]);
      } else if (static_cast<int>(v.size()) == spec.dim) {
        for (int i = 0; i < spec.dim; ++i) var[i] = v[i];
      } else {
        throw FormatError(source + ": " + diag_key + " needs 1 or dim values");
      }
    }
    double rho = 0.0;
    it = kv.find(corr_key);
    if (it != kv.end()) {
      const std::vector<double> v = ParseList(it->second, corr_key, source);
      if (v.size() != 1) throw FormatError(source + ": " + corr_key + " is scalar");
      rho = v[0];
    }
    Matrix m(spec.dim, spec.dim);
    for (int i = 0; i < spec.dim; ++i)
      for (int j = 0; j < spec.dim; ++j)
        m(i, j) = i == j ? var[i] : rho * std::sqrt(var[i] * var[j]);
    return m;
  };
  spec.b_cov = build("b_diag", "b_corr");
  spec.w_cov = build("w_diag", "w_corr");
  try {
    spec.Validate();
  } catch (const Error &e) {
    throw FormatError(source + ": " + e.what());
  }
  return spec;
}

void ClusterSpec::Validate() const {
  if (n_clusters < 1) throw InvalidInput("cluster spec: n_clusters must be >= 1");
  if (points_per_cluster < 0)
    throw InvalidInput("cluster spec: points_per_cluster must be >= 0");
  if (!(cluster_spread >= 0.0))
    throw InvalidInput("cluster spec: cluster_spread must be >= 0");
  CheckCovariance(within_cov, 2, "within_cov", false);
}

ClusterData GenCluster2d(const ClusterSpec &spec) {
  spec.Validate();
  const Matrix root = SqrtPsd(spec.within_cov);
  Rng rng(spec.seed, 0);
  ClusterData data;
  for (int c = 0; c < spec.n_clusters; ++c)
    data.centers.push_back(spec.cluster_spread * rng.NormalVector(2));
  for (int c = 0; c < spec.n_clusters; ++c) {
    for (int i = 0; i < spec.points_per_cluster; ++i) {
      data.points.push_back(data.centers[c] + rng.NormalVector(2) * root);
      data.labels.push_back(c);
    }
  }
  return data;
}

std::vector<Vector> SampleGenerative(const VaeModel &model, int n,
                                     std::uint64_t seed) {
  if (n < 0) throw InvalidInput("sample count must be >= 0");
  Rng rng(seed, 5);
  const int d_h = model.config.d_h, d_x = model.config.d_x;
  std::vector<Vector> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Vector h = rng.NormalVector(d_h);
    const GenerativeOutput g = GenForward(h, model.gen);
    out.push_back(ReparamSample(g.p, rng.NormalVector(d_x)));
  }
  return out;
}

double CaptureFraction(const std::vector<Vector> &centers,
                       const std::vector<Vector> &samples, double radius) {
  if (centers.empty()) throw InvalidInput("capture: no cluster centers");
  int hit = 0;
  for (const Vector &c : centers) {
    for (const Vector &s : samples) {
      if (s.size() != c.size()) throw ShapeError("capture: dimension mismatch");
      if ((s - c).norm() <= radius) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(centers.size());
}

double CaptureScore(const ClusterData &data, const VaeModel &model, int n_gen,
                    double radius, std::uint64_t seed) {
  if (model.config.d_x != 2)
    throw ShapeError("capture score needs a 2-D model, got d_x = " +
                     std::to_string(model.config.d_x));
  return CaptureFraction(data.centers, SampleGenerative(model, n_gen, seed),
                         radius);
}

double DefaultCaptureRadius(const ClusterSpec &spec) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(spec.within_cov);
  return 2.0 * std::sqrt(eig.eigenvalues().maxCoeff());
}

}  // namespace vaeverif
