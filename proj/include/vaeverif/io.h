// include/vaeverif/io.h

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

#ifndef VAEVERIF_IO_H_
#define VAEVERIF_IO_H_

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "vaeverif/types.h"

namespace vaeverif {

// ---------------------------------------------------------------------------
// Line-oriented reader that keeps track of the file name and line number so
// that every FormatError can point at the offending line.

class LineReader {
 public:
  LineReader(std::istream &is, std::string source);

  // Next non-empty line split on whitespace; false at end of input.
  bool NextTokens(std::vector<std::string> *tokens);
  // Like NextTokens but end of input is an error.
  std::vector<std::string> ExpectTokens(const std::string &what);

  [[noreturn]] void Fail(const std::string &msg) const;
  double ParseDouble(const std::string &tok) const;
  long ParseInt(const std::string &tok) const;

  const std::string &source() const { return source_; }
  long line() const { return line_; }

 private:
  std::istream &is_;
  std::string source_;
  long line_ = 0;
};

// Shortest decimal form that reads back to the same double.
std::string FormatDouble(double v, int significant_digits = 17);

// ---------------------------------------------------------------------------
// Labeled matrix blocks shared by the model, PLDA and pipeline formats:
//   name rows cols
//   v11 v12 ...
//   ...

void WriteBlock(std::ostream &os, const std::string &name, const Matrix &m);
Matrix ReadBlock(LineReader &reader, const std::string &expected_name);
Matrix ReadBlock(LineReader &reader, const std::string &expected_name,
                 Eigen::Index rows, Eigen::Index cols);
void ExpectHeader(LineReader &reader, const std::string &header);

// ---------------------------------------------------------------------------
// Vector tables.  File layout:
//   vaeverif-vectors v1
//   dim D count N
//   vec_id speaker_id v_1 ... v_D
// speaker_id is "-" for unlabeled vectors.

struct VectorSet {
  static constexpr const char *kNoSpeaker = "-";

  int dim = 0;
  std::vector<std::string> ids;
  std::vector<std::string> speakers;
  std::vector<Vector> vectors;

  std::size_t size() const { return vectors.size(); }
  void Add(std::string id, std::string speaker, Vector v);
  // Index of `id`; throws LookupError naming the id.
  std::size_t IndexOf(const std::string &id) const;
  const Vector &Get(const std::string &id) const {
    return vectors[IndexOf(id)];
  }
  bool Labeled() const;

 private:
  mutable std::unordered_map<std::string, std::size_t> index_;
};

void WriteVectors(std::ostream &os, const VectorSet &set);
VectorSet ReadVectors(std::istream &is, const std::string &source);
void WriteVectorsFile(const std::string &path, const VectorSet &set);
VectorSet ReadVectorsFile(const std::string &path);

// ---------------------------------------------------------------------------
// Trials: `enroll_id test_id {tar|non|unk}` per line.

enum class TrialLabel { kTarget, kImpostor, kUnknown };

struct Trial {
  std::string enroll_id;
  std::string test_id;
  TrialLabel label = TrialLabel::kUnknown;
};

using TrialSet = std::vector<Trial>;

const char *LabelToken(TrialLabel label);
void WriteTrials(std::ostream &os, const TrialSet &trials);
TrialSet ReadTrials(std::istream &is, const std::string &source);
void WriteTrialsFile(const std::string &path, const TrialSet &trials);
TrialSet ReadTrialsFile(const std::string &path);

// ---------------------------------------------------------------------------
// Scores: `enroll_id test_id score` with 9 significant digits.

struct ScoredTrial {
  Trial trial;
  double score = 0.0;
  int k_used = 0;
};

using ScoreSet = std::vector<ScoredTrial>;

void WriteScores(std::ostream &os, const ScoreSet &scores);
ScoreSet ReadScores(std::istream &is, const std::string &source);
void WriteScoresFile(const std::string &path, const ScoreSet &scores);
ScoreSet ReadScoresFile(const std::string &path);

// Attaches the labels of `trials` to `scores` by (enroll, test) pair and
// returns the labeled (score, is_target) lists; unknown-label trials are
// skipped.  Missing pairs raise LookupError.
void MatchScoresToTrials(const ScoreSet &scores, const TrialSet &trials,
                         std::vector<double> *out_scores,
                         std::vector<bool> *out_is_target);

// ---------------------------------------------------------------------------
// Flat key=value files; '#' starts a comment.

using KeyValues = std::map<std::string, std::string>;
KeyValues ReadKeyValues(std::istream &is, const std::string &source);
KeyValues ReadKeyValuesFile(const std::string &path);

// File helpers that raise FormatError naming the path on failure.
std::ifstream OpenInput(const std::string &path);
std::ofstream OpenOutput(const std::string &path);

}  // namespace vaeverif

#endif  // VAEVERIF_IO_H_
