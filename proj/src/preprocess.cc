// src/preprocess.cc

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

#include "vaeverif/preprocess.h"

#include <cmath>

#include "vaeverif/error.h"
#include "vaeverif/io.h"

namespace vaeverif {

CovarianceMode ParseMode(const std::string &name) {
  if (name == "diag") return CovarianceMode::kDiag;
  if (name == "full") return CovarianceMode::kFull;
  throw InvalidInput("unknown covariance mode '" + name +
                     "', expected diag or full");
}

Vector SampleMean(const std::vector<Vector> &xs) {
  if (xs.empty()) throw InvalidInput("mean of an empty set");
  Vector m = Vector::Zero(xs.front().size());
  for (const Vector &x : xs) {
    if (x.size() != m.size()) throw ShapeError("inconsistent vector dimensions");
    m += x;
  }
  return m / static_cast<double>(xs.size());
}

Matrix SampleCovariance(const std::vector<Vector> &xs, const Vector &mean) {
  const Eigen::Index d = mean.size();
  Matrix c = Matrix::Zero(d, d);
  for (const Vector &x : xs) {
    const Vector r = x - mean;
    c.noalias() += r.transpose() * r;
  }
  return c / static_cast<double>(xs.size());
}

namespace {

// Flips every column so that its largest-magnitude entry is positive.
void FixSigns(Matrix *m) {
  for (Eigen::Index j = 0; j < m->cols(); ++j) {
    Eigen::Index arg = 0;
    m->col(j).cwiseAbs().maxCoeff(&arg);
    if ((*m)(arg, j) < 0.0) m->col(j) *= -1.0;
  }
}

}  // namespace

Pipeline FitPipeline(const std::vector<Vector> &train, CovarianceMode mode,
                     std::optional<int> pca_dim, bool length_norm) {
  if (train.empty()) throw InvalidInput("FitPipeline: no training vectors");
  const Eigen::Index d = train.front().size();
  if (mode == CovarianceMode::kFull &&
      static_cast<Eigen::Index>(train.size()) < d + 1)
    throw InvalidInput("FitPipeline: full whitening needs at least d + 1 = " +
                       std::to_string(d + 1) + " vectors");
  if (train.size() < 2)
    throw InvalidInput("FitPipeline: need at least 2 training vectors");
  if (pca_dim && (*pca_dim < 1 || *pca_dim > d))
    throw InvalidInput("FitPipeline: PCA dimension must lie in [1, d]");

  Pipeline p;
  p.mode = mode;
  p.length_norm = length_norm;
  p.mean = SampleMean(train);
  const Matrix cov = SampleCovariance(train, p.mean);

  if (mode == CovarianceMode::kFull) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success)
      throw NumericError("FitPipeline: eigendecomposition failed");
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmax > 0.0) || !std::isfinite(lmax))
      throw NumericError("FitPipeline: covariance is rank deficient");
    const Eigen::VectorXd inv_sqrt =
        eig.eigenvalues()
            .cwiseMax(kEigenFloor * lmax)
            .cwiseSqrt()
            .cwiseInverse();
    p.whiten = eig.eigenvectors() * inv_sqrt.asDiagonal() *
               eig.eigenvectors().transpose();
  } else {
    p.whiten.resize(1, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!(cov(j, j) > 0.0))
        throw NumericError("FitPipeline: coordinate " + std::to_string(j) +
                           " has zero variance");
      p.whiten(0, j) = 1.0 / std::sqrt(cov(j, j));
    }
  }

  if (pca_dim) {
    Matrix wcov;
    if (mode == CovarianceMode::kFull) {
      wcov = p.whiten.transpose() * cov * p.whiten;
    } else {
      const Eigen::VectorXd s = p.whiten.row(0).transpose();
      wcov = s.asDiagonal() * cov * s.asDiagonal();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (wcov + wcov.transpose()));
    if (eig.info() != Eigen::Success)
      throw NumericError("FitPipeline: PCA eigendecomposition failed");
    // Eigenvalues ascend; the top components are the trailing columns.
    Matrix proj(d, *pca_dim);
    for (int k = 0; k < *pca_dim; ++k)
      proj.col(k) = eig.eigenvectors().col(d - 1 - k);
    FixSigns(&proj);
    p.pca = std::move(proj);
  }
  return p;
}

Vector Apply(const Pipeline &p, const Vector &x) {
  if (x.size() != p.InDim())
    throw ShapeError("pipeline input has dimension " +
                     std::to_string(x.size()) + ", expected " +
                     std::to_string(p.InDim()));
  Vector y = x - p.mean;
  if (p.mode == CovarianceMode::kFull) {
    y = y * p.whiten;
  } else {
    y = y.cwiseProduct(p.whiten.row(0));
  }
  if (p.pca) y = y * *p.pca;
  if (p.length_norm) {
    const double norm = y.norm();
    if (!(norm > 0.0)) throw InvalidInput("zero-norm vector");
    y /= norm;
  }
  return y;
}

std::vector<Vector> Apply(const Pipeline &pipeline,
                          const std::vector<Vector> &xs) {
  std::vector<Vector> out;
  out.reserve(xs.size());
  for (const Vector &x : xs) out.push_back(Apply(pipeline, x));
  return out;
}

void WritePipeline(std::ostream &os, const Pipeline &p) {
  os << "vaeverif-pipeline v1\n";
  os << "mode " << ModeName(p.mode) << '\n';
  os << "length_norm " << (p.length_norm ? 1 : 0) << '\n';
  WriteBlock(os, "mean", p.mean);
  WriteBlock(os, "whiten", p.whiten);
  if (p.pca) WriteBlock(os, "pca", *p.pca);
}

Pipeline ReadPipeline(std::istream &is, const std::string &source) {
  LineReader reader(is, source);
  ExpectHeader(reader, "vaeverif-pipeline v1");
  Pipeline p;
  std::vector<std::string> toks = reader.ExpectTokens("'mode diag|full'");
  if (toks.size() != 2 || toks[0] != "mode") reader.Fail("expected 'mode ...'");
  try {
    p.mode = ParseMode(toks[1]);
  } catch (const InvalidInput &e) {
    reader.Fail(e.what());
  }
  toks = reader.ExpectTokens("'length_norm 0|1'");
  if (toks.size() != 2 || toks[0] != "length_norm" ||
      (toks[1] != "0" && toks[1] != "1"))
    reader.Fail("expected 'length_norm 0|1'");
  p.length_norm = toks[1] == "1";
  const Matrix mean = ReadBlock(reader, "mean");
  if (mean.rows() != 1 || mean.cols() < 1) reader.Fail("mean must be 1 x d");
  p.mean = mean.row(0);
  const Eigen::Index d = p.mean.size();
  if (p.mode == CovarianceMode::kFull)
    p.whiten = ReadBlock(reader, "whiten", d, d);
  else
    p.whiten = ReadBlock(reader, "whiten", 1, d);
  if (reader.NextTokens(&toks)) {
    if (toks.size() != 3 || toks[0] != "pca") reader.Fail("expected pca block");
    const long rows = reader.ParseInt(toks[1]), cols = reader.ParseInt(toks[2]);
    if (rows != d || cols < 1 || cols > d) reader.Fail("bad pca block shape");
    Matrix proj(rows, cols);
    for (long r = 0; r < rows; ++r) {
      std::vector<std::string> row = reader.ExpectTokens("pca row");
      if (static_cast<long>(row.size()) != cols) reader.Fail("bad pca row");
      for (long c = 0; c < cols; ++c) proj(r, c) = reader.ParseDouble(row[c]);
    }
    p.pca = std::move(proj);
  }
  return p;
}

}  // namespace vaeverif
