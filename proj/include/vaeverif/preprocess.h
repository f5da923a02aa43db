// include/vaeverif/preprocess.h

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

#ifndef VAEVERIF_PREPROCESS_H_
#define VAEVERIF_PREPROCESS_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vaeverif/types.h"

namespace vaeverif {

// Centering, whitening, optional PCA and length normalization, fitted once
// on training vectors and applied unchanged to everything else.
struct Pipeline {
  CovarianceMode mode = CovarianceMode::kDiag;
  Vector mean;
  Matrix whiten;              // d x d (full) or 1 x d holding 1/sigma (diag)
  std::optional<Matrix> pca;  // d x p, orthonormal columns
  bool length_norm = true;

  int InDim() const { return static_cast<int>(mean.size()); }
  int OutDim() const {
    return pca ? static_cast<int>(pca->cols()) : InDim();
  }
};

// Relative floor applied to covariance eigenvalues before inversion.
inline constexpr double kEigenFloor = 1e-10;

/**
   Fits a pipeline on `train`.  Full mode whitens with C^(-1/2) from the
   symmetric eigendecomposition of the sample covariance C (eigenvalues
   floored at kEigenFloor * max); diag mode scales each coordinate by
   1/sigma_j.  PCA, when requested, is fitted on the centered and whitened
   data: the top `pca_dim` eigenvectors, each signed so that its
   largest-magnitude entry is positive.

   Requires at least d + 1 vectors in full mode and 2 in diag mode.
*/
Pipeline FitPipeline(const std::vector<Vector> &train, CovarianceMode mode,
                     std::optional<int> pca_dim = std::nullopt,
                     bool length_norm = true);

// ((x - mean) U) P, then scaled to unit norm if length_norm is set.
// Throws InvalidInput("zero-norm vector") when normalizing a zero vector.
Vector Apply(const Pipeline &pipeline, const Vector &x);
std::vector<Vector> Apply(const Pipeline &pipeline,
                          const std::vector<Vector> &xs);

// Sample mean and (1/N) covariance.
Vector SampleMean(const std::vector<Vector> &xs);
Matrix SampleCovariance(const std::vector<Vector> &xs, const Vector &mean);

// Block format with header "vaeverif-pipeline v1".
void WritePipeline(std::ostream &os, const Pipeline &pipeline);
Pipeline ReadPipeline(std::istream &is, const std::string &source);

}  // namespace vaeverif

#endif  // VAEVERIF_PREPROCESS_H_
