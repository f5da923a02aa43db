// tests/test_synth.cc

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

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "vaeverif/error.h"
#include "vaeverif/eval.h"
#include "vaeverif/plda.h"
#include "vaeverif/preprocess.h"
#include "vaeverif/synth.h"

using namespace vaeverif;

namespace {

CorpusSpec SmallSpec() {
  CorpusSpec s;
  s.dim = 3;
  s.n_speakers = 50;
  s.sessions_per_speaker = 4;
  s.b_cov = Matrix::Identity(3, 3);
  s.w_cov = 0.5 * Matrix::Identity(3, 3);
  s.n_dev_speakers = 20;
  s.n_test_speakers = 30;
  s.n_trials = 40;
  s.seed = 7;
  return s;
}

bool SameSet(const VectorSet &a, const VectorSet &b) {
  if (a.ids != b.ids || a.speakers != b.speakers || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.vectors[i] != b.vectors[i]) return false;
  return true;
}

bool SameTrials(const TrialSet &a, const TrialSet &b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].enroll_id != b[i].enroll_id || a[i].test_id != b[i].test_id ||
        a[i].label != b[i].label)
      return false;
  return true;
}

}  // namespace

TEST_CASE("gen_two_cov_corpus is deterministic") {
  const SyntheticCorpus a = GenTwoCovCorpus(SmallSpec()), b = GenTwoCovCorpus(SmallSpec());
  CHECK(SameSet(a.train, b.train));
  CHECK(SameSet(a.dev, b.dev));
  CHECK(SameSet(a.test, b.test));
  CHECK(SameTrials(a.dev_trials, b.dev_trials));
  CHECK(SameTrials(a.test_trials, b.test_trials));
  CorpusSpec other = SmallSpec();
  other.seed = 8;
  CHECK_FALSE(SameSet(GenTwoCovCorpus(other).train, a.train));
}

TEST_CASE("gen_two_cov_corpus structure") {
  const SyntheticCorpus c = GenTwoCovCorpus(SmallSpec());
  CHECK(c.train.size() == 200);
  CHECK(c.dev.size() == 80);
  CHECK(c.test.size() == 120);
  CHECK(c.train.ids[0] == "spk00000-00");
  CHECK(c.train.speakers[0] == "spk00000");
  CHECK(c.dev.speakers[0] == "spk00050");
  CHECK(c.test.speakers[0] == "spk00070");

  std::set<std::string> tr(c.train.speakers.begin(), c.train.speakers.end());
  std::set<std::string> dv(c.dev.speakers.begin(), c.dev.speakers.end());
  std::set<std::string> ts(c.test.speakers.begin(), c.test.speakers.end());
  for (const auto &s : dv) CHECK(tr.count(s) == 0);
  for (const auto &s : ts) {
    CHECK(tr.count(s) == 0);
    CHECK(dv.count(s) == 0);
  }

  for (const auto *pair : {&c.dev_trials, &c.test_trials}) {
    const VectorSet &vs = pair == &c.dev_trials ? c.dev : c.test;
    int n_tar = 0, n_non = 0;
    std::set<std::pair<std::string, std::string>> seen;
    for (const Trial &t : *pair) {
      const bool same = vs.speakers[vs.IndexOf(t.enroll_id)] ==
                        vs.speakers[vs.IndexOf(t.test_id)];
      CHECK(t.enroll_id != t.test_id);
      CHECK(same == (t.label == TrialLabel::kTarget));
      (t.label == TrialLabel::kTarget ? n_tar : n_non)++;
      CHECK(seen.insert({t.enroll_id, t.test_id}).second);
    }
    CHECK(n_tar == 40);
    CHECK(n_non == 40);
  }
}

TEST_CASE("gen_two_cov_corpus: single sessions give no target pairs") {
  CorpusSpec s = SmallSpec();
  s.sessions_per_speaker = 1;
  try {
    GenTwoCovCorpus(s);
    FAIL("expected InvalidInput");
  } catch (const InvalidInput &e) {
    CHECK(std::string(e.what()).find("no target pairs") != std::string::npos);
  }
}

TEST_CASE("gen_two_cov_corpus: spec validation") {
  CorpusSpec s = SmallSpec();
  s.w_cov = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(GenTwoCovCorpus(s), InvalidInput);
  s = SmallSpec();
  s.b_cov = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(GenTwoCovCorpus(s), ShapeError);
  s = SmallSpec();
  s.n_speakers = 0;
  CHECK_THROWS_AS(GenTwoCovCorpus(s), InvalidInput);
  s = SmallSpec();
  s.b_cov(0, 1) = 0.3;
  CHECK_THROWS_AS(GenTwoCovCorpus(s), InvalidInput);
}

TEST_CASE("gen_two_cov_corpus: sample statistics") {
  CorpusSpec s;
  s.dim = 10;
  s.n_speakers = 2000;
  s.sessions_per_speaker = 10;
  s.b_cov = Matrix::Identity(10, 10);
  s.w_cov = Matrix::Identity(10, 10);
  s.n_test_speakers = 2;
  s.n_trials = 1;
  s.seed = 3;
  const SyntheticCorpus c = GenTwoCovCorpus(s);
  std::map<std::string, std::vector<Vector>> by;
  for (std::size_t i = 0; i < c.train.size(); ++i)
    by[c.train.speakers[i]].push_back(c.train.vectors[i]);
  std::vector<Vector> means, resid;
  for (const auto &[spk, xs] : by) {
    const Vector m = SampleMean(xs);
    means.push_back(m);
    for (const Vector &x : xs) resid.push_back(x - m);
  }
  // Unbiased within-speaker scatter: divide by N - S.
  const Matrix w = SampleCovariance(resid, Vector::Zero(10)) *
                   (static_cast<double>(resid.size()) / (resid.size() - by.size()));
  // Between-speaker means carry W / n of within noise.
  const Matrix b = SampleCovariance(means, SampleMean(means)) - w / 10.0;
  for (int i = 0; i < 10; ++i) {
    CHECK(b(i, i) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(w(i, i) == doctest::Approx(1.0).epsilon(0.1));
    for (int j = 0; j < i; ++j) {
      CHECK(std::abs(b(i, j)) < 0.1);
      CHECK(std::abs(w(i, j)) < 0.1);
    }
  }
}

TEST_CASE("gen_two_cov_corpus: B = 0 gives chance-level PLDA") {
  CorpusSpec s;
  s.dim = 4;
  s.n_speakers = 500;
  s.sessions_per_speaker = 5;
  s.b_cov = Matrix::Zero(4, 4);
  s.w_cov = Matrix::Identity(4, 4);
  s.n_test_speakers = 200;
  s.n_trials = 500;
  s.seed = 5;
  const SyntheticCorpus c = GenTwoCovCorpus(s);
  REQUIRE(c.test_trials.size() == 1000);
  const PldaTwoCov m = FitTwoCov(c.train, CovarianceMode::kDiag, 20);
  const ScoreSet sc = ScorePldaTrials(c.test_trials, c.test, m);
  std::vector<double> scores;
  std::vector<bool> tar;
  MatchScoresToTrials(sc, c.test_trials, &scores, &tar);
  CHECK(std::abs(ComputeEer(scores, tar).eer - 0.5) <= 0.05);
}

TEST_CASE("parse_corpus_spec") {
  KeyValues kv{{"dim", "3"},         {"n_speakers", "10"}, {"b_diag", "1 2 3"},
               {"w_diag", "0.5"},    {"w_corr", "0.5"},    {"seed", "4"},
               {"n_trials", "7"}};
  const CorpusSpec s = ParseCorpusSpec(kv, "spec.txt");
  CHECK(s.dim == 3);
  CHECK(s.n_speakers == 10);
  CHECK(s.seed == 4);
  CHECK(s.n_trials == 7);
  CHECK(s.b_cov(2, 2) == 3.0);
  CHECK(s.b_cov(0, 1) == 0.0);
  CHECK(s.w_cov(1, 1) == 0.5);
  CHECK(s.w_cov(0, 1) == doctest::Approx(0.25));
  CHECK_THROWS_AS(ParseCorpusSpec({{"bogus", "1"}}, "s"), FormatError);
  CHECK_THROWS_AS(ParseCorpusSpec({{"dim", "2"}, {"b_diag", "1 2 3"}}, "s"), FormatError);
  CHECK_THROWS_AS(ParseCorpusSpec({{"n_speakers", "2.5"}}, "s"), FormatError);
  CHECK_THROWS_AS(ParseCorpusSpec({{"w_diag", "-1"}}, "s"), FormatError);
}

TEST_CASE("gen_cluster_2d") {
  SUBCASE("single blob with identity covariance") {
    ClusterSpec s;
    s.n_clusters = 1;
    s.points_per_cluster = 10000;
    s.seed = 2;
    const ClusterData d = GenCluster2d(s);
    REQUIRE(d.points.size() == 10000);
    const Matrix c = SampleCovariance(d.points, SampleMean(d.points));
    CHECK((c - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.05);
  }
  SUBCASE("within-cluster correlation") {
    ClusterSpec s;
    s.n_clusters = 10;
    s.points_per_cluster = 1000;
    s.within_cov << 1.0, 0.9, 0.9, 1.0;
    s.seed = 3;
    const ClusterData d = GenCluster2d(s);
    REQUIRE(d.points.size() == 10000);
    REQUIRE(d.centers.size() == 10);
    std::vector<Vector> resid;
    for (std::size_t i = 0; i < d.points.size(); ++i)
      resid.push_back(d.points[i] - d.centers[d.labels[i]]);
    const Matrix c = SampleCovariance(resid, Vector::Zero(2));
    const double r = c(0, 1) / std::sqrt(c(0, 0) * c(1, 1));
    CHECK(r >= 0.85);
    CHECK(r <= 0.95);
  }
  SUBCASE("no points per cluster") {
    ClusterSpec s;
    s.points_per_cluster = 0;
    const ClusterData d = GenCluster2d(s);
    CHECK(d.points.empty());
    CHECK(d.labels.empty());
  }
  SUBCASE("deterministic") {
    ClusterSpec s;
    const ClusterData a = GenCluster2d(s), b = GenCluster2d(s);
    CHECK(a.points == b.points);
    CHECK(a.centers == b.centers);
  }
  SUBCASE("validation") {
    ClusterSpec s;
    s.within_cov << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(GenCluster2d(s), InvalidInput);
  }
}

TEST_CASE("capture") {
  ClusterSpec s;
  s.n_clusters = 5;
  s.points_per_cluster = 10;
  s.cluster_spread = 20.0;
  s.seed = 4;
  const ClusterData d = GenCluster2d(s);
  CHECK(DefaultCaptureRadius(s) == doctest::Approx(2.0));

  SUBCASE("samples at every center") {
    CHECK(CaptureFraction(d.centers, d.centers, 1e-9) == 1.0);
  }
  SUBCASE("tiny blob at the origin captures nothing far away") {
    std::vector<Vector> far = d.centers;
    for (Vector &c : far) c = c.normalized() * 50.0;
    std::vector<Vector> blob;
    Rng rng(1);
    for (int i = 0; i < 100; ++i) blob.push_back(rng.NormalVector(2) * 1e-3);
    CHECK(CaptureFraction(far, blob, 2.0) == 0.0);
  }
  SUBCASE("model-based score") {
    VaeConfig c;
    c.d_x = 2;
    c.d_d = 4;
    c.d_h = 2;
    VaeModel m = InitParams(c, 1);
    for (Matrix *b : Blocks(m)) b->setZero();
    // Mean fixed at the first center, precision e^30.
    m.gen.mu.Bias() = d.centers[0];
    m.gen.tau.Bias().setConstant(30.0);
    CHECK(CaptureScore(d, m, 50, 1.0, 1) == doctest::Approx(1.0 / 5.0));
    const auto xs = SampleGenerative(m, 20, 3);
    REQUIRE(xs.size() == 20);
    CHECK((xs[0] - d.centers[0]).norm() < 1e-3);
    c.d_x = 3;
    CHECK_THROWS_AS(CaptureScore(d, InitParams(c, 1), 10, 1.0, 1), ShapeError);
  }
}
