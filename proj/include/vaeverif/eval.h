// include/vaeverif/eval.h

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

#ifndef VAEVERIF_EVAL_H_
#define VAEVERIF_EVAL_H_

#include <ostream>
#include <span>
#include <vector>

namespace vaeverif {

struct CostParams {
  double c_miss = 1.0;
  double c_fa = 1.0;
  double p_target = 0.001;
  bool normalized = true;

  void Validate() const;
};

struct EerResult {
  double eer = 0.0;        // fraction in [0, 1]
  double threshold = 0.0;
};

struct MinDcfResult {
  double min_dcf = 0.0;
  double threshold = 0.0;  // may be +inf (reject everything)
};

struct DetPoint {
  double threshold;
  double p_miss;
  double p_fa;
};

using DetCurve = std::vector<DetPoint>;

// A trial is accepted when its score is >= threshold.  All three functions
// throw InvalidInput ("undefined EER") unless there is at least one target
// and one impostor; `scores` and `is_target` must have equal length.

/**
   Equal error rate.  The operating points of every threshold lying between
   two adjacent distinct scores (plus accept-all and reject-all) form a
   polyline in (p_miss, p_fa); the EER is where it crosses p_miss = p_fa,
   by linear interpolation along the segment.  Walking across one distinct
   score moves linearly from "all tied trials rejected" to "all accepted",
   so ties count half as miss and half as false alarm at that score.  The
   reported threshold is the score of the crossing segment (or the midpoint
   between scores when the crossing falls on a vertex).
*/
EerResult ComputeEer(std::span<const double> scores,
                     const std::vector<bool> &is_target);

// Minimum over thresholds {each distinct score, +inf} of
// c_miss p_tar p_miss + c_fa (1 - p_tar) p_fa, optionally divided by
// min(c_miss p_tar, c_fa (1 - p_tar)).
MinDcfResult ComputeMinDcf(std::span<const double> scores,
                           const std::vector<bool> &is_target,
                           const CostParams &costs = {});

// Detection cost at one threshold, normalized per `costs`.
double DetectionCost(std::span<const double> scores,
                     const std::vector<bool> &is_target, double threshold,
                     const CostParams &costs = {});

// One point per distinct score plus +inf, thresholds increasing.
DetCurve DetPoints(std::span<const double> scores,
                   const std::vector<bool> &is_target);

// CSV writers: `metric,value,threshold` and `threshold,p_miss,p_fa`.
void WriteMetricsCsv(std::ostream &os, const EerResult &eer,
                     const MinDcfResult &dcf);
void WriteDetCsv(std::ostream &os, const DetCurve &curve);

}  // namespace vaeverif

#endif  // VAEVERIF_EVAL_H_
