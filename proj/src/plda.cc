// src/plda.cc

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

#include "vaeverif/plda.h"

#include <cmath>
#include <map>
#include <unordered_map>

#include "vaeverif/error.h"
#include "vaeverif/preprocess.h"

namespace vaeverif {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

using ColVector = Eigen::VectorXd;

struct SpeakerStats {
  int dim = 0;
  long total = 0;               // number of vectors
  std::vector<int> count;       // sessions per speaker
  std::vector<ColVector> sum;   // centered sums
  Matrix scatter;               // sum over all vectors of c c'
};

SpeakerStats Accumulate(const VectorSet &corpus, const Vector &mu) {
  SpeakerStats st;
  st.dim = static_cast<int>(mu.size());
  st.scatter = Matrix::Zero(st.dim, st.dim);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string &spk = corpus.speakers[i];
    if (spk == VectorSet::kNoSpeaker)
      throw InvalidInput("PLDA training needs speaker labels; vector '" +
                         corpus.ids[i] + "' is unlabeled");
    auto [it, inserted] = index.emplace(spk, st.count.size());
    if (inserted) {
      st.count.push_back(0);
      st.sum.push_back(ColVector::Zero(st.dim));
    }
    const ColVector c = (corpus.vectors[i] - mu).transpose();
    st.count[it->second] += 1;
    st.sum[it->second] += c;
    st.scatter.noalias() += c * c.transpose();
    ++st.total;
  }
  return st;
}

Eigen::LLT<Matrix> Factor(const Matrix &m, const char *what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success || !m.allFinite())
    throw NumericError(std::string("singular or non-PD covariance: ") + what);
  return llt;
}

double LogDet(const Eigen::LLT<Matrix> &llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Matrix KeepDiagonal(const Matrix &m) {
  return Matrix(m.diagonal().asDiagonal());
}

// Posterior of every speaker's centered mean under (B, W).  Speakers with
// the same session count share L_s, so its inverse is computed once per
// count.
struct Posterior {
  std::vector<ColVector> mean;
  std::map<int, Matrix> cov;      // keyed by session count
  std::map<int, double> log_det_precision;
};

Posterior EStep(const SpeakerStats &st, const Matrix &b_inv,
                const Matrix &w_inv) {
  Posterior post;
  for (int n : st.count) {
    if (post.cov.count(n)) continue;
    const Matrix l = b_inv + static_cast<double>(n) * w_inv;
    Eigen::LLT<Matrix> llt = Factor(l, "posterior precision");
    post.cov[n] = llt.solve(Matrix::Identity(st.dim, st.dim));
    post.log_det_precision[n] = LogDet(llt);
  }
  post.mean.reserve(st.count.size());
  for (std::size_t s = 0; s < st.count.size(); ++s)
    post.mean.push_back(post.cov[st.count[s]] * (w_inv * st.sum[s]));
  return post;
}

double LogLikelihood(const SpeakerStats &st, const Matrix &b, const Matrix &w) {
  const Eigen::LLT<Matrix> b_llt = Factor(b, "B"), w_llt = Factor(w, "W");
  const Matrix eye = Matrix::Identity(st.dim, st.dim);
  const Matrix b_inv = b_llt.solve(eye), w_inv = w_llt.solve(eye);
  const double log_det_b = LogDet(b_llt), log_det_w = LogDet(w_llt);
  const Posterior post = EStep(st, b_inv, w_inv);
  const double d = st.dim;
  // sum_s sum_i c' W^-1 c over all vectors.
  double ll = -0.5 * (w_inv.cwiseProduct(st.scatter)).sum();
  for (std::size_t s = 0; s < st.count.size(); ++s) {
    const int n = st.count[s];
    const ColVector &y = post.mean[s];
    ll += -0.5 * n * (d * kLog2Pi + log_det_w);
    ll += y.dot(w_inv * st.sum[s]) - 0.5 * n * y.dot(w_inv * y);
    ll += -0.5 * (d * kLog2Pi + log_det_b + y.dot(b_inv * y));
    ll += 0.5 * d * kLog2Pi - 0.5 * post.log_det_precision.at(n);
  }
  return ll;
}

}  // namespace

PldaTwoCov FitTwoCov(const VectorSet &corpus, CovarianceMode mode, int iters,
                     std::vector<double> *log_likelihood) {
  if (corpus.size() == 0) throw InvalidInput("PLDA training set is empty");
  if (iters < 0) throw InvalidInput("PLDA iteration count must be >= 0");
  std::vector<Vector> xs(corpus.vectors.begin(), corpus.vectors.end());
  PldaTwoCov model;
  model.mode = mode;
  model.mu = SampleMean(xs);
  const SpeakerStats st = Accumulate(corpus, model.mu);
  if (st.count.size() < 2)
    throw InvalidInput("PLDA training needs at least 2 speakers");
  bool any_repeat = false;
  for (int n : st.count) any_repeat = any_repeat || n >= 2;
  if (!any_repeat) throw InvalidInput("insufficient within-speaker data");

  const Matrix total = st.scatter / static_cast<double>(st.total);
  model.b_cov = 0.5 * total;
  model.w_cov = 0.5 * total;
  if (mode == CovarianceMode::kDiag) {
    model.b_cov = KeepDiagonal(model.b_cov);
    model.w_cov = KeepDiagonal(model.w_cov);
  }
  if (log_likelihood) {
    log_likelihood->clear();
    log_likelihood->push_back(LogLikelihood(st, model.b_cov, model.w_cov));
  }

  const int d = st.dim;
  const Matrix eye = Matrix::Identity(d, d);
  const double n_spk = static_cast<double>(st.count.size());
  for (int it = 0; it < iters; ++it) {
    const Matrix b_inv = Factor(model.b_cov, "B").solve(eye);
    const Matrix w_inv = Factor(model.w_cov, "W").solve(eye);
    const Posterior post = EStep(st, b_inv, w_inv);

    Matrix b_acc = Matrix::Zero(d, d);
    Matrix w_acc = st.scatter;
    for (std::size_t s = 0; s < st.count.size(); ++s) {
      const ColVector &y = post.mean[s];
      const Matrix &cov = post.cov.at(st.count[s]);
      const Matrix second = y * y.transpose() + cov;
      b_acc += second;
      const Matrix cross = y * st.sum[s].transpose();
      w_acc -= cross + cross.transpose();
      w_acc += static_cast<double>(st.count[s]) * second;
    }
    Matrix b_new = b_acc / n_spk;
    Matrix w_new = w_acc / static_cast<double>(st.total);
    b_new = 0.5 * (b_new + b_new.transpose());
    w_new = 0.5 * (w_new + w_new.transpose());
    if (mode == CovarianceMode::kDiag) {
      b_new = KeepDiagonal(b_new);
      w_new = KeepDiagonal(w_new);
    }
    model.b_cov = std::move(b_new);
    model.w_cov = std::move(w_new);
    if (log_likelihood)
      log_likelihood->push_back(LogLikelihood(st, model.b_cov, model.w_cov));
  }
  return model;
}

double TwoCovLogLikelihood(const VectorSet &corpus, const PldaTwoCov &model) {
  return LogLikelihood(Accumulate(corpus, model.mu), model.b_cov, model.w_cov);
}

PldaScorer::PldaScorer(const PldaTwoCov &model) : model_(model) {
  const int d = model.Dim();
  if (model.b_cov.rows() != d || model.b_cov.cols() != d ||
      model.w_cov.rows() != d || model.w_cov.cols() != d)
    throw ShapeError("PLDA covariance shapes do not match the mean");
  if (model.mode == CovarianceMode::kDiag) {
    q_.resize(1, d);
    p_.resize(1, d);
    offset_ = 0.0;
    for (int i = 0; i < d; ++i) {
      const double b = model.b_cov(i, i), w = model.w_cov(i, i);
      const double t = b + w;
      const double s = t - b * b / t;
      if (!(t > 0.0) || !(s > 0.0) || !(b >= 0.0) || !std::isfinite(t))
        throw NumericError("non-PD PLDA covariance in dimension " +
                           std::to_string(i));
      q_(0, i) = 1.0 / t - 1.0 / s;
      p_(0, i) = b / (t * s);
      offset_ += 0.5 * (std::log(t) - std::log(s));
    }
    return;
  }
  const Matrix eye = Matrix::Identity(d, d);
  const Matrix t = model.b_cov + model.w_cov;
  const Eigen::LLT<Matrix> t_llt = Factor(t, "B + W");
  const Matrix t_inv = t_llt.solve(eye);
  Matrix s = t - model.b_cov * t_inv * model.b_cov;
  s = 0.5 * (s + s.transpose());
  const Eigen::LLT<Matrix> s_llt = Factor(s, "B + W - B (B + W)^-1 B");
  const Matrix s_inv = s_llt.solve(eye);
  q_ = t_inv - s_inv;
  q_ = 0.5 * (q_ + q_.transpose());
  p_ = t_inv * model.b_cov * s_inv;
  p_ = 0.5 * (p_ + p_.transpose());
  offset_ = 0.5 * (LogDet(t_llt) - LogDet(s_llt));
}

double PldaScorer::Llr(const Vector &x1, const Vector &x2) const {
  if (x1.size() != model_.Dim() || x2.size() != model_.Dim())
    throw ShapeError("PLDA input dimension mismatch");
  const Vector c1 = x1 - model_.mu, c2 = x2 - model_.mu;
  if (model_.mode == CovarianceMode::kDiag) {
    double acc = offset_;
    for (Eigen::Index i = 0; i < c1.size(); ++i) {
      acc += 0.5 * q_(0, i) * (c1[i] * c1[i] + c2[i] * c2[i]) +
             p_(0, i) * (c1[i] * c2[i]);
    }
    return acc;
  }
  const double self = 0.5 * (c1 * q_).dot(c1) + 0.5 * (c2 * q_).dot(c2);
  const double cross = 0.5 * ((c1 * p_).dot(c2) + (c2 * p_).dot(c1));
  return offset_ + self + cross;
}

double PldaLlr(const Vector &x1, const Vector &x2, const PldaTwoCov &model) {
  return PldaScorer(model).Llr(x1, x2);
}

ScoreSet ScorePldaTrials(const TrialSet &trials, const VectorSet &vectors,
                         const PldaTwoCov &model) {
  const PldaScorer scorer(model);
  ScoreSet scores;
  scores.reserve(trials.size());
  for (const Trial &t : trials) {
    ScoredTrial s;
    s.trial = t;
    s.score = scorer.Llr(vectors.Get(t.enroll_id), vectors.Get(t.test_id));
    scores.push_back(std::move(s));
  }
  return scores;
}

std::vector<ModeMetrics> FullVsDiagReport(const VectorSet &train,
                                          const VectorSet &test,
                                          const TrialSet &trials,
                                          const ComparisonOptions &opts) {
  std::vector<ModeMetrics> rows;
  for (CovarianceMode mode : {CovarianceMode::kDiag, CovarianceMode::kFull}) {
    VectorSet train_t = train, test_t = test;
    if (opts.whiten) {
      const Pipeline pipe =
          FitPipeline(train.vectors, mode, std::nullopt, opts.length_norm);
      for (Vector &v : train_t.vectors) v = Apply(pipe, v);
      for (Vector &v : test_t.vectors) v = Apply(pipe, v);
    }
    const PldaTwoCov model = FitTwoCov(train_t, mode, opts.iters);
    const ScoreSet scores = ScorePldaTrials(trials, test_t, model);
    std::vector<double> values;
    std::vector<bool> is_target;
    MatchScoresToTrials(scores, trials, &values, &is_target);
    ModeMetrics row{mode, std::nullopt, std::nullopt};
    bool has_tar = false, has_non = false;
    for (bool t : is_target) (t ? has_tar : has_non) = true;
    if (has_tar && has_non) {
      row.eer = ComputeEer(values, is_target).eer;
      row.min_dcf = ComputeMinDcf(values, is_target, opts.costs).min_dcf;
    }
    rows.push_back(row);
  }
  return rows;
}

void WritePlda(std::ostream &os, const PldaTwoCov &model) {
  os << "vaeverif-plda v1\n";
  os << "mode " << ModeName(model.mode) << '\n';
  WriteBlock(os, "mu", model.mu);
  if (model.mode == CovarianceMode::kDiag) {
    WriteBlock(os, "B", model.b_cov.diagonal().transpose());
    WriteBlock(os, "W", model.w_cov.diagonal().transpose());
  } else {
    WriteBlock(os, "B", model.b_cov);
    WriteBlock(os, "W", model.w_cov);
  }
}

PldaTwoCov ReadPlda(std::istream &is, const std::string &source) {
  LineReader reader(is, source);
  ExpectHeader(reader, "vaeverif-plda v1");
  std::vector<std::string> toks = reader.ExpectTokens("'mode diag|full'");
  if (toks.size() != 2 || toks[0] != "mode") reader.Fail("expected 'mode ...'");
  PldaTwoCov model;
  try {
    model.mode = ParseMode(toks[1]);
  } catch (const InvalidInput &e) {
    reader.Fail(e.what());
  }
  const Matrix mu = ReadBlock(reader, "mu");
  if (mu.rows() != 1 || mu.cols() < 1) reader.Fail("mu must be 1 x d");
  model.mu = mu.row(0);
  const Eigen::Index d = model.mu.size();
  if (model.mode == CovarianceMode::kDiag) {
    model.b_cov = ReadBlock(reader, "B", 1, d).row(0).asDiagonal();
    model.w_cov = ReadBlock(reader, "W", 1, d).row(0).asDiagonal();
  } else {
    model.b_cov = ReadBlock(reader, "B", d, d);
    model.w_cov = ReadBlock(reader, "W", d, d);
  }
  if (reader.NextTokens(&toks)) reader.Fail("trailing data after PLDA model");
  return model;
}

}  // namespace vaeverif
