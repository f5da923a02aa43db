// tests/test_scoring.cc

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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "oracles.h"
#include "vaeverif/error.h"
#include "vaeverif/scoring.h"
#include "vaeverif/synth.h"
#include "vaeverif/training.h"

using namespace vaeverif;

namespace {

VaeModel ZeroModel(int d_x, int d_d, int d_h) {
  VaeConfig c;
  c.d_x = d_x;
  c.d_d = d_d;
  c.d_h = d_h;
  VaeModel m = InitParams(c, 1);
  for (Matrix *b : Blocks(m)) b->setZero();
  return m;
}

double StdNormalLogPdf(const Vector &x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += oracle::NormalLogPdf(x[i], 0.0, 1.0);
  return s;
}

std::vector<double> Ranks(const std::vector<double> &v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
  return r;
}

double Spearman(const std::vector<double> &a, const std::vector<double> &b) {
  const std::vector<double> ra = Ranks(a), rb = Ranks(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

struct MeanSe {
  double mean, se;
};

template <class F>
MeanSe Repeat(int n, F f) {
  double s = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = f(i);
    s += v;
    sq += v * v;
  }
  const double m = s / n;
  return {m, std::sqrt(std::max(0.0, sq / n - m * m) / (n - 1))};
}

}  // namespace

TEST_CASE("log_mean_exp") {
  const double a[] = {0.0, 0.0, 0.0};
  CHECK(LogMeanExp(a) == 0.0);
  const double b[] = {1000.0, 1000.0 + std::log(3.0)};
  CHECK(LogMeanExp(b) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  const double c[] = {-1000.0};
  CHECK(LogMeanExp(c) == -1000.0);
  const double d[] = {-std::numeric_limits<double>::infinity(), std::log(2.0)};
  CHECK(LogMeanExp(d) == doctest::Approx(0.0));
}

TEST_CASE("degenerate model: marginals are exact for any K") {
  const VaeModel m = ZeroModel(3, 4, 2);
  Rng rng(1);
  for (int t = 0; t < 10; ++t) {
    const Vector x1 = rng.NormalVector(3), x2 = rng.NormalVector(3);
    for (int k : {1, 7, 100}) {
      CHECK(LogMarginal(x1, m, k, t) == doctest::Approx(StdNormalLogPdf(x1)).epsilon(1e-13));
      CHECK(LogJointMarginal(x1, x2, m, k, t) ==
            doctest::Approx(StdNormalLogPdf(x1) + StdNormalLogPdf(x2)).epsilon(1e-13));
      CHECK(std::abs(Llr(x1, x2, m, k, t)) < 1e-12);
      CHECK(std::abs(Llr(x1, x1, m, k, t, true)) < 1e-12);
    }
  }
}

TEST_CASE("K = 1 equals the single importance weight") {
  const VaeModel m = oracle::RandomModel(2, 3, 2, 31);
  Rng rng(2);
  const Vector x = rng.NormalVector(2), x2 = rng.NormalVector(2);
  Matrix eps(1, 2);
  eps.row(0) = rng.NormalVector(2);
  const InferenceOutput q = InferForward(x, m.inf);
  const Vector h = ReparamSample(q.q, eps.row(0));
  const GenerativeOutput g = GenForward(h, m.gen);
  const double w = LogDensityDiag(x, g.p) + StdNormalLogPdf(h) - LogDensityDiag(h, q.q);
  CHECK(LogMarginalWithEps(x, m, eps) == doctest::Approx(w).epsilon(1e-14));

  const InferenceOutput q2 = InferForward(x2, m.inf);
  const Vector h2 = ReparamSample(q2.q, eps.row(0));
  const GenerativeOutput g2 = GenForward(h2, m.gen);
  const double wj = LogDensityDiag(x, g2.p) + LogDensityDiag(x2, g2.p) +
                    StdNormalLogPdf(h2) - LogDensityDiag(h2, q2.q);
  CHECK(LogJointMarginalWithEps(x, x2, m, eps) == doctest::Approx(wj).epsilon(1e-14));
}

TEST_CASE("llr decomposes into the three marginals") {
  const VaeModel m = oracle::RandomModel(2, 3, 2, 32);
  Rng rng(3);
  const Vector t = rng.NormalVector(2), e = rng.NormalVector(2);
  const double llr = Llr(t, e, m, 50, 9);
  Rng eps_rng(9);
  Matrix eps(50, 2);
  for (Eigen::Index i = 0; i < 50; ++i) eps.row(i) = eps_rng.NormalVector(2);
  const double expect = LogJointMarginalWithEps(t, e, m, eps) -
                        LogMarginalWithEps(t, m, eps) - LogMarginalWithEps(e, m, eps);
  CHECK(llr == doctest::Approx(expect).epsilon(1e-13));
  const double a = LogJointMarginalWithEps(t, e, m, eps);
  const double b = LogJointMarginalWithEps(e, t, m, eps);
  const double sym = std::max(a, b) + std::log(0.5 * (1.0 + std::exp(-std::abs(a - b))));
  CHECK(Llr(t, e, m, 50, 9, true) ==
        doctest::Approx(sym - LogMarginalWithEps(t, m, eps) -
                        LogMarginalWithEps(e, m, eps))
            .epsilon(1e-13));
  CHECK(Llr(t, t, m, 50, 9, true) == Llr(t, t, m, 50, 9, false));
}

TEST_CASE("importance estimates converge to quadrature on a 1-D model") {
  const VaeModel m = oracle::RandomModel(1, 3, 1, 33, 0.6);
  Vector x1(1), x2(1);
  x1 << 0.3;
  x2 << -0.5;
  const MeanSe lm = Repeat(20, [&](int r) { return LogMarginal(x1, m, 10000, 100 + r); });
  CHECK(std::abs(lm.mean - oracle::QuadLogMarginal1d(x1[0], m)) < 3.0 * lm.se + 1e-9);
  const double qj = oracle::QuadLogJoint1d(x1[0], x2[0], m);
  const MeanSe ja =
      Repeat(20, [&](int r) { return LogJointMarginal(x1, x2, m, 10000, 200 + r); });
  const MeanSe jb =
      Repeat(20, [&](int r) { return LogJointMarginal(x2, x1, m, 10000, 300 + r); });
  CHECK(std::abs(ja.mean - qj) < 3.0 * ja.se + 1e-9);
  CHECK(std::abs(jb.mean - qj) < 3.0 * jb.se + 1e-9);
  const double qself = oracle::QuadLogJoint1d(x1[0], x1[0], m);
  const MeanSe js =
      Repeat(20, [&](int r) { return LogJointMarginal(x1, x1, m, 10000, 400 + r); });
  CHECK(std::abs(js.mean - qself) < 3.0 * js.se + 1e-9);
}

TEST_CASE("k must be positive") {
  const VaeModel m = ZeroModel(1, 1, 1);
  CHECK_THROWS_AS(LogMarginal(Vector::Zero(1), m, 0, 1), InvalidInput);
  CHECK_THROWS_AS(Llr(Vector::Zero(1), Vector::Zero(1), m, 0, 1), InvalidInput);
}

namespace {

VectorSet SmallVectors(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  VectorSet vs;
  for (int i = 0; i < n; ++i)
    vs.Add("v" + std::to_string(i), VectorSet::kNoSpeaker, rng.NormalVector(d));
  return vs;
}

}  // namespace

TEST_CASE("score_trials") {
  const VaeModel m = oracle::RandomModel(2, 3, 2, 34);
  const VectorSet vs = SmallVectors(6, 2, 4);
  TrialSet trials;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j)
        trials.push_back({"v" + std::to_string(i), "v" + std::to_string(j),
                          i % 2 == j % 2 ? TrialLabel::kTarget : TrialLabel::kImpostor});

  SUBCASE("empty trial list") {
    CHECK(ScoreTrials({}, vs, m, 10, 1).empty());
  }
  SUBCASE("permutation invariance") {
    const ScoreSet a = ScoreTrials(trials, vs, m, 10, 1);
    TrialSet perm = trials;
    std::reverse(perm.begin(), perm.end());
    std::rotate(perm.begin(), perm.begin() + 7, perm.end());
    const ScoreSet b = ScoreTrials(perm, vs, m, 10, 1);
    REQUIRE(a.size() == trials.size());
    for (const ScoredTrial &sa : a) {
      auto it = std::find_if(b.begin(), b.end(), [&](const ScoredTrial &sb) {
        return sb.trial.enroll_id == sa.trial.enroll_id &&
               sb.trial.test_id == sa.trial.test_id;
      });
      REQUIRE(it != b.end());
      CHECK(it->score == sa.score);
      CHECK(it->k_used == 10);
    }
  }
  SUBCASE("matches a direct llr call") {
    const ScoreSet a = ScoreTrials(trials, vs, m, 10, 1);
    for (std::size_t i = 0; i < trials.size(); ++i) {
      const Trial &t = trials[i];
      CHECK(a[i].score == Llr(vs.Get(t.test_id), vs.Get(t.enroll_id), m, 10,
                              TrialSeed(1, t)));
      CHECK(a[i].trial.label == t.label);
    }
  }
  SUBCASE("missing id names the id") {
    TrialSet bad = {{"v0", "nope", TrialLabel::kTarget}};
    try {
      ScoreTrials(bad, vs, m, 10, 1);
      FAIL("expected LookupError");
    } catch (const LookupError &e) {
      CHECK(std::string(e.what()).find("nope") != std::string::npos);
    }
  }
  SUBCASE("trial seeds depend on ids and base seed") {
    const Trial t1{"a", "b", TrialLabel::kUnknown};
    const Trial t2{"b", "a", TrialLabel::kUnknown};
    const Trial t3{"a", "b", TrialLabel::kTarget};
    CHECK(TrialSeed(1, t1) == TrialSeed(1, t3));
    CHECK(TrialSeed(1, t1) != TrialSeed(1, t2));
    CHECK(TrialSeed(1, t1) != TrialSeed(2, t1));
    const Trial t4{"ab", "", TrialLabel::kUnknown};
    const Trial t5{"a", "b", TrialLabel::kUnknown};
    CHECK(TrialSeed(1, t4) != TrialSeed(1, t5));
  }
}

TEST_CASE("degenerate model scores every trial zero") {
  const VaeModel m = ZeroModel(2, 3, 2);
  const VectorSet vs = SmallVectors(4, 2, 5);
  TrialSet trials = {{"v0", "v1", TrialLabel::kTarget}, {"v2", "v3", TrialLabel::kImpostor},
                     {"v1", "v1", TrialLabel::kTarget}};
  for (const ScoredTrial &s : ScoreTrials(trials, vs, m, 20, 3))
    CHECK(std::abs(s.score) < 1e-12);
}

TEST_CASE("K = 1 and K = 100 rank trials alike on a trained model") {
  // Five-dimensional speaker subspace with a strong between-speaker
  // variance: a regime where the latent structure is identifiable.
  CorpusSpec spec;
  spec.dim = 10;
  spec.n_speakers = 2000;
  spec.sessions_per_speaker = 5;
  spec.n_test_speakers = 50;
  spec.n_trials = 50;
  Rng vrng(99);
  Matrix v(10, 5);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = vrng.Normal();
  spec.b_cov = 10.0 * v * v.transpose();
  spec.w_cov = Matrix::Identity(10, 10);
  spec.seed = 4;
  const SyntheticCorpus corpus = GenTwoCovCorpus(spec);

  VaeConfig c;
  c.d_x = 10;
  c.d_d = 16;
  c.d_h = 5;
  c.eta = 3e-3;
  c.max_iters = 200;
  c.minibatch = 50;
  c.seed = 2;
  const FitResult fit = Fit(corpus.train.vectors, std::nullopt, c);
  const ScoreSet k100 = ScoreTrials(corpus.test_trials, corpus.test, fit.model, 100, 1);
  const ScoreSet k1 = ScoreTrials(corpus.test_trials, corpus.test, fit.model, 1, 1);
  REQUIRE(k100.size() == 100);
  std::vector<double> a, b;
  for (std::size_t i = 0; i < k100.size(); ++i) {
    a.push_back(k100[i].score);
    b.push_back(k1[i].score);
  }
  CHECK(Spearman(a, b) > 0.95);
}
