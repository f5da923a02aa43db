// src/eval.cc

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

#include "vaeverif/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vaeverif/error.h"
#include "vaeverif/io.h"

namespace vaeverif {

namespace {

// Operating points after sorting: vertex i rejects every trial whose score
// is among the i smallest distinct values.  vertex 0 accepts all.
struct Sweep {
  std::vector<double> distinct;  // ascending distinct scores, size G
  std::vector<double> p_miss;    // size G + 1
  std::vector<double> p_fa;      // size G + 1
};

Sweep BuildSweep(std::span<const double> scores,
                 const std::vector<bool> &is_target) {
  if (scores.size() != is_target.size())
    throw ShapeError("scores and labels differ in length");
  std::size_t n_tar = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw InvalidInput("non-finite score");
    if (is_target[i]) ++n_tar;
  }
  const std::size_t n_non = scores.size() - n_tar;
  if (n_tar == 0 || n_non == 0)
    throw InvalidInput("undefined EER: need both target and impostor trials");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  Sweep sw;
  sw.p_miss.push_back(0.0);
  sw.p_fa.push_back(1.0);
  std::size_t tar_below = 0, non_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (is_target[order[i]]) ++tar_below;
      else ++non_below;
      ++i;
    }
    sw.distinct.push_back(s);
    sw.p_miss.push_back(static_cast<double>(tar_below) / n_tar);
    sw.p_fa.push_back(static_cast<double>(n_non - non_below) / n_non);
  }
  return sw;
}

double CostAt(double p_miss, double p_fa, const CostParams &c) {
  double cost = c.c_miss * c.p_target * p_miss +
                c.c_fa * (1.0 - c.p_target) * p_fa;
  if (c.normalized)
    cost /= std::min(c.c_miss * c.p_target, c.c_fa * (1.0 - c.p_target));
  return cost;
}

}  // namespace

void CostParams::Validate() const {
  if (!(c_miss > 0.0) || !(c_fa > 0.0))
    throw InvalidInput("detection costs must be positive");
  if (!(p_target > 0.0 && p_target < 1.0))
    throw InvalidInput("p_target must lie in (0, 1)");
}

EerResult ComputeEer(std::span<const double> scores,
                     const std::vector<bool> &is_target) {
  const Sweep sw = BuildSweep(scores, is_target);
  std::size_t i = 0;
  while (sw.p_miss[i] - sw.p_fa[i] < 0.0) ++i;  // d_0 = -1, d_last = +1
  const double d_i = sw.p_miss[i] - sw.p_fa[i];
  EerResult r;
  if (d_i == 0.0) {
    r.eer = sw.p_miss[i];
    // The end vertices have |d| = 1, so i is interior.
    r.threshold = 0.5 * (sw.distinct[i - 1] + sw.distinct[i]);
    return r;
  }
  const double d_prev = sw.p_miss[i - 1] - sw.p_fa[i - 1];
  const double alpha = -d_prev / (d_i - d_prev);
  r.eer = sw.p_miss[i - 1] + alpha * (sw.p_miss[i] - sw.p_miss[i - 1]);
  r.threshold = sw.distinct[i - 1];
  return r;
}

MinDcfResult ComputeMinDcf(std::span<const double> scores,
                           const std::vector<bool> &is_target,
                           const CostParams &costs) {
  costs.Validate();
  const Sweep sw = BuildSweep(scores, is_target);
  MinDcfResult best;
  best.min_dcf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sw.p_miss.size(); ++i) {
    const double cost = CostAt(sw.p_miss[i], sw.p_fa[i], costs);
    if (cost < best.min_dcf) {
      best.min_dcf = cost;
      best.threshold = i < sw.distinct.size()
                           ? sw.distinct[i]
                           : std::numeric_limits<double>::infinity();
    }
  }
  return best;
}

double DetectionCost(std::span<const double> scores,
                     const std::vector<bool> &is_target, double threshold,
                     const CostParams &costs) {
  costs.Validate();
  BuildSweep(scores, is_target);  // validation only
  std::size_t n_tar = 0, n_non = 0, miss = 0, fa = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (is_target[i]) {
      ++n_tar;
      if (scores[i] < threshold) ++miss;
    } else {
      ++n_non;
      if (scores[i] >= threshold) ++fa;
    }
  }
  return CostAt(static_cast<double>(miss) / n_tar,
                static_cast<double>(fa) / n_non, costs);
}

DetCurve DetPoints(std::span<const double> scores,
                   const std::vector<bool> &is_target) {
  const Sweep sw = BuildSweep(scores, is_target);
  DetCurve curve;
  curve.reserve(sw.p_miss.size());
  for (std::size_t i = 0; i < sw.p_miss.size(); ++i)
    curve.push_back({i < sw.distinct.size()
                         ? sw.distinct[i]
                         : std::numeric_limits<double>::infinity(),
                     sw.p_miss[i], sw.p_fa[i]});
  return curve;
}

void WriteMetricsCsv(std::ostream &os, const EerResult &eer,
                     const MinDcfResult &dcf) {
  os << "metric,value,threshold\n";
  os << "eer," << FormatDouble(eer.eer, 9) << ','
     << FormatDouble(eer.threshold, 9) << '\n';
  os << "mindcf," << FormatDouble(dcf.min_dcf, 9) << ','
     << FormatDouble(dcf.threshold, 9) << '\n';
}

void WriteDetCsv(std::ostream &os, const DetCurve &curve) {
  os << "threshold,p_miss,p_fa\n";
  for (const DetPoint &p : curve)
    os << FormatDouble(p.threshold, 9) << ',' << FormatDouble(p.p_miss, 9)
       << ',' << FormatDouble(p.p_fa, 9) << '\n';
}

}  // namespace vaeverif
