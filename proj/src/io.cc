// src/io.cc

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

#include "vaeverif/io.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <unordered_map>

#include "vaeverif/error.h"

namespace vaeverif {

LineReader::LineReader(std::istream &is, std::string source)
    : is_(is), source_(std::move(source)) {}

bool LineReader::NextTokens(std::vector<std::string> *tokens) {
  std::string line;
  while (std::getline(is_, line)) {
    ++line_;
    std::istringstream ss(line);
    tokens->clear();
    std::string tok;
    while (ss >> tok) tokens->push_back(tok);
    if (!tokens->empty()) return true;
  }
  return false;
}

std::vector<std::string> LineReader::ExpectTokens(const std::string &what) {
  std::vector<std::string> tokens;
  if (!NextTokens(&tokens)) Fail("unexpected end of file, expected " + what);
  return tokens;
}

void LineReader::Fail(const std::string &msg) const {
  throw FormatError(source_ + ":" + std::to_string(line_) + ": " + msg);
}

double LineReader::ParseDouble(const std::string &tok) const {
  const char *begin = tok.c_str();
  char *end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  // ERANGE on underflow still yields a usable (denormal or zero) value.
  if (end == begin || *end != '\0' || (errno == ERANGE && std::isinf(v)))
    Fail("cannot parse real number '" + tok + "'");
  return v;
}

long LineReader::ParseInt(const std::string &tok) const {
  const char *begin = tok.c_str();
  char *end = nullptr;
  errno = 0;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE)
    Fail("cannot parse integer '" + tok + "'");
  return v;
}

std::string FormatDouble(double v, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
  return buf;
}

void WriteBlock(std::ostream &os, const std::string &name, const Matrix &m) {
  os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) os << ' ';
      os << FormatDouble(m(r, c));
    }
    os << '\n';
  }
}

Matrix ReadBlock(LineReader &reader, const std::string &expected_name) {
  std::vector<std::string> head = reader.ExpectTokens("block " + expected_name);
  if (head.size() != 3 || head[0] != expected_name)
    reader.Fail("expected block header '" + expected_name + " rows cols'");
  long rows = reader.ParseInt(head[1]), cols = reader.ParseInt(head[2]);
  if (rows < 0 || cols < 0) reader.Fail("negative block dimensions");
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    std::vector<std::string> toks =
        reader.ExpectTokens("row " + std::to_string(r) + " of " + expected_name);
    if (static_cast<long>(toks.size()) != cols)
      reader.Fail("block " + expected_name + " row has " +
                  std::to_string(toks.size()) + " values, expected " +
                  std::to_string(cols));
    for (long c = 0; c < cols; ++c) m(r, c) = reader.ParseDouble(toks[c]);
  }
  return m;
}

Matrix ReadBlock(LineReader &reader, const std::string &expected_name,
                 Eigen::Index rows, Eigen::Index cols) {
  Matrix m = ReadBlock(reader, expected_name);
  if (m.rows() != rows || m.cols() != cols)
    reader.Fail("block " + expected_name + " has shape " +
                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                ", expected " + std::to_string(rows) + "x" +
                std::to_string(cols));
  return m;
}

void ExpectHeader(LineReader &reader, const std::string &header) {
  std::vector<std::string> toks = reader.ExpectTokens("header");
  std::string joined;
  for (std::size_t i = 0; i < toks.size(); ++i)
    joined += (i ? " " : "") + toks[i];
  if (joined != header)
    reader.Fail("bad header '" + joined + "', expected '" + header + "'");
}

// ---------------------------------------------------------------------------

void VectorSet::Add(std::string id, std::string speaker, Vector v) {
  if (vectors.empty() && dim == 0) dim = static_cast<int>(v.size());
  if (v.size() != dim)
    throw ShapeError("vector '" + id + "' has dimension " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(dim));
  if (index_.size() == ids.size()) {
    if (!index_.emplace(id, ids.size()).second)
      throw InvalidInput("duplicate vector id '" + id + "'");
  }
  ids.push_back(std::move(id));
  speakers.push_back(std::move(speaker));
  vectors.push_back(std::move(v));
}

std::size_t VectorSet::IndexOf(const std::string &id) const {
  if (index_.size() != ids.size()) {
    index_.clear();
    for (std::size_t i = 0; i < ids.size(); ++i) index_.emplace(ids[i], i);
  }
  auto it = index_.find(id);
  if (it == index_.end()) throw LookupError("unknown vector id '" + id + "'");
  return it->second;
}

bool VectorSet::Labeled() const {
  for (const std::string &s : speakers)
    if (s == kNoSpeaker) return false;
  return true;
}

void WriteVectors(std::ostream &os, const VectorSet &set) {
  os << "vaeverif-vectors v1\n";
  os << "dim " << set.dim << " count " << set.size() << '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    os << set.ids[i] << ' ' << set.speakers[i];
    for (Eigen::Index j = 0; j < set.vectors[i].size(); ++j)
      os << ' ' << FormatDouble(set.vectors[i][j]);
    os << '\n';
  }
}

VectorSet ReadVectors(std::istream &is, const std::string &source) {
  LineReader reader(is, source);
  ExpectHeader(reader, "vaeverif-vectors v1");
  std::vector<std::string> toks = reader.ExpectTokens("'dim D count N'");
  if (toks.size() != 4 || toks[0] != "dim" || toks[2] != "count")
    reader.Fail("expected 'dim D count N'");
  long dim = reader.ParseInt(toks[1]), count = reader.ParseInt(toks[3]);
  if (dim < 1 || count < 0) reader.Fail("invalid dim/count");
  VectorSet set;
  set.dim = static_cast<int>(dim);
  for (long n = 0; n < count; ++n) {
    toks = reader.ExpectTokens("vector line");
    if (static_cast<long>(toks.size()) != dim + 2)
      reader.Fail("vector line has " + std::to_string(toks.size() - 2) +
                  " values, expected " + std::to_string(dim));
    Vector v(dim);
    for (long j = 0; j < dim; ++j) v[j] = reader.ParseDouble(toks[j + 2]);
    try {
      set.Add(toks[0], toks[1], std::move(v));
    } catch (const InvalidInput &e) {
      reader.Fail(e.what());
    }
  }
  if (reader.NextTokens(&toks)) reader.Fail("trailing data after vectors");
  return set;
}

std::ifstream OpenInput(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw FormatError(path + ": cannot open for reading");
  return is;
}

std::ofstream OpenOutput(const std::string &path) {
  std::ofstream os(path);
  if (!os) throw FormatError(path + ": cannot open for writing");
  return os;
}

void WriteVectorsFile(const std::string &path, const VectorSet &set) {
  std::ofstream os = OpenOutput(path);
  WriteVectors(os, set);
}

VectorSet ReadVectorsFile(const std::string &path) {
  std::ifstream is = OpenInput(path);
  return ReadVectors(is, path);
}

// ---------------------------------------------------------------------------

const char *LabelToken(TrialLabel label) {
  switch (label) {
    case TrialLabel::kTarget: return "tar";
    case TrialLabel::kImpostor: return "non";
    default: return "unk";
  }
}

void WriteTrials(std::ostream &os, const TrialSet &trials) {
  for (const Trial &t : trials)
    os << t.enroll_id << ' ' << t.test_id << ' ' << LabelToken(t.label)
       << '\n';
}

TrialSet ReadTrials(std::istream &is, const std::string &source) {
  LineReader reader(is, source);
  TrialSet trials;
  std::vector<std::string> toks;
  while (reader.NextTokens(&toks)) {
    if (toks.size() != 3) reader.Fail("expected 'enroll_id test_id label'");
    Trial t{toks[0], toks[1], TrialLabel::kUnknown};
    if (toks[2] == "tar") t.label = TrialLabel::kTarget;
    else if (toks[2] == "non") t.label = TrialLabel::kImpostor;
    else if (toks[2] != "unk") reader.Fail("bad trial label '" + toks[2] + "'");
    trials.push_back(std::move(t));
  }
  return trials;
}

void WriteTrialsFile(const std::string &path, const TrialSet &trials) {
  std::ofstream os = OpenOutput(path);
  WriteTrials(os, trials);
}

TrialSet ReadTrialsFile(const std::string &path) {
  std::ifstream is = OpenInput(path);
  return ReadTrials(is, path);
}

// ---------------------------------------------------------------------------

void WriteScores(std::ostream &os, const ScoreSet &scores) {
  for (const ScoredTrial &s : scores)
    os << s.trial.enroll_id << ' ' << s.trial.test_id << ' '
       << FormatDouble(s.score, 9) << '\n';
}

ScoreSet ReadScores(std::istream &is, const std::string &source) {
  LineReader reader(is, source);
  ScoreSet scores;
  std::vector<std::string> toks;
  while (reader.NextTokens(&toks)) {
    if (toks.size() != 3) reader.Fail("expected 'enroll_id test_id score'");
    ScoredTrial s;
    s.trial = Trial{toks[0], toks[1], TrialLabel::kUnknown};
    s.score = reader.ParseDouble(toks[2]);
    if (!std::isfinite(s.score)) reader.Fail("non-finite score");
    scores.push_back(std::move(s));
  }
  return scores;
}

void WriteScoresFile(const std::string &path, const ScoreSet &scores) {
  std::ofstream os = OpenOutput(path);
  WriteScores(os, scores);
}

ScoreSet ReadScoresFile(const std::string &path) {
  std::ifstream is = OpenInput(path);
  return ReadScores(is, path);
}

void MatchScoresToTrials(const ScoreSet &scores, const TrialSet &trials,
                         std::vector<double> *out_scores,
                         std::vector<bool> *out_is_target) {
  std::unordered_map<std::string, double> by_pair;
  for (const ScoredTrial &s : scores)
    by_pair[s.trial.enroll_id + '\t' + s.trial.test_id] = s.score;
  out_scores->clear();
  out_is_target->clear();
  for (const Trial &t : trials) {
    if (t.label == TrialLabel::kUnknown) continue;
    auto it = by_pair.find(t.enroll_id + '\t' + t.test_id);
    if (it == by_pair.end())
      throw LookupError("no score for trial '" + t.enroll_id + " " +
                        t.test_id + "'");
    out_scores->push_back(it->second);
    out_is_target->push_back(t.label == TrialLabel::kTarget);
  }
}

// ---------------------------------------------------------------------------

KeyValues ReadKeyValues(std::istream &is, const std::string &source) {
  KeyValues kv;
  std::string line;
  long line_no = 0;
  auto trim = [](std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(source + ":" + std::to_string(line_no) +
                        ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw FormatError(source + ":" + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw FormatError(source + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
  }
  return kv;
}

KeyValues ReadKeyValuesFile(const std::string &path) {
  std::ifstream is = OpenInput(path);
  return ReadKeyValues(is, path);
}

}  // namespace vaeverif
