// include/vaeverif/types.h

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

#ifndef VAEVERIF_TYPES_H_
#define VAEVERIF_TYPES_H_

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>

namespace vaeverif {

// All vectors are row vectors; a layer maps x (1 x in) to x W + b (1 x out).
using Vector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;

// Covariance structure shared by whitening and the PLDA baseline.
enum class CovarianceMode { kDiag, kFull };

inline const char *ModeName(CovarianceMode m) {
  return m == CovarianceMode::kDiag ? "diag" : "full";
}

// Throws InvalidInput (declared in error.h) on anything but "diag"/"full".
CovarianceMode ParseMode(const std::string &name);

// Seeded generator used everywhere randomness appears.  Wrapping the engine
// keeps the normal/uniform draws in one place so every module consumes the
// stream the same way.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double Normal() { return normal_(engine_); }
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  // Uniform integer in [0, n).
  std::size_t Index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  Vector NormalVector(Eigen::Index dim) {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = Normal();
    return v;
  }

  std::mt19937_64 &engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace vaeverif

#endif  // VAEVERIF_TYPES_H_
