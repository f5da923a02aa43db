// tests/test_io.cc

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
#include <limits>
#include <sstream>

#include "doctest.h"
#include "vaeverif/error.h"
#include "vaeverif/io.h"

using namespace vaeverif;

namespace {

std::string ErrorOf(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("format_double round-trips") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.Normal(), static_cast<int>(rng.Index(200)) - 100);
    CHECK(std::stod(FormatDouble(v)) == v);
  }
  CHECK(FormatDouble(0.5) == "0.5");
  CHECK(FormatDouble(-0.0) == "-0");
  CHECK(FormatDouble(1.0 / 3.0, 9) == "0.333333333");
  CHECK(FormatDouble(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("matrix blocks") {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 1.0 / 7.0;
  std::stringstream ss;
  WriteBlock(ss, "blk", m);
  LineReader r(ss, "mem");
  CHECK(ReadBlock(r, "blk") == m);

  std::istringstream wrong_name("other 1 1\n0\n");
  LineReader r2(wrong_name, "f");
  CHECK(ErrorOf([&] { ReadBlock(r2, "blk"); }).rfind("f:1:", 0) == 0);

  std::istringstream short_row("blk 2 2\n1 2\n3\n");
  LineReader r3(short_row, "f");
  CHECK(ErrorOf([&] { ReadBlock(r3, "blk"); }).rfind("f:3:", 0) == 0);

  std::istringstream bad_num("blk 1 2\n1 x\n");
  LineReader r4(bad_num, "f");
  CHECK_THROWS_AS(ReadBlock(r4, "blk"), FormatError);

  std::istringstream shape("blk 1 2\n1 2\n");
  LineReader r5(shape, "f");
  CHECK_THROWS_AS(ReadBlock(r5, "blk", 2, 1), FormatError);
}

TEST_CASE("vector sets") {
  VectorSet vs;
  Vector a(2), b(2);
  a << 1.5, -2.0;
  b << 1e-300, 3.0;
  vs.Add("a", "spk1", a);
  vs.Add("b", VectorSet::kNoSpeaker, b);
  CHECK(vs.dim == 2);
  CHECK(vs.IndexOf("b") == 1);
  CHECK(vs.Get("a") == a);
  CHECK_FALSE(vs.Labeled());
  CHECK_THROWS_AS(vs.Add("a", "s", a), InvalidInput);
  CHECK_THROWS_AS(vs.Add("c", "s", Vector::Zero(3)), ShapeError);
  CHECK(ErrorOf([&] { vs.IndexOf("zz"); }).find("zz") != std::string::npos);
  CHECK_THROWS_AS(vs.IndexOf("zz"), LookupError);

  std::stringstream ss;
  WriteVectors(ss, vs);
  CHECK(ss.str().rfind("vaeverif-vectors v1\ndim 2 count 2\na spk1 ", 0) == 0);
  const VectorSet back = ReadVectors(ss, "v");
  CHECK(back.ids == vs.ids);
  CHECK(back.speakers == vs.speakers);
  CHECK(back.vectors == vs.vectors);
}

TEST_CASE("vector file errors name file and line") {
  std::istringstream short_line("vaeverif-vectors v1\ndim 2 count 1\na s 1\n");
  CHECK(ErrorOf([&] { ReadVectors(short_line, "x.vec"); }).rfind("x.vec:3:", 0) == 0);
  std::istringstream trailing("vaeverif-vectors v1\ndim 1 count 1\na s 1\nb s 2\n");
  CHECK_THROWS_AS(ReadVectors(trailing, "x.vec"), FormatError);
  std::istringstream missing("vaeverif-vectors v1\ndim 1 count 2\na s 1\n");
  CHECK_THROWS_AS(ReadVectors(missing, "x.vec"), FormatError);
  std::istringstream header("vectors\n");
  CHECK(ErrorOf([&] { ReadVectors(header, "x.vec"); }).rfind("x.vec:1:", 0) == 0);
  std::istringstream dup("vaeverif-vectors v1\ndim 1 count 2\na s 1\na s 2\n");
  CHECK(ErrorOf([&] { ReadVectors(dup, "x.vec"); }).rfind("x.vec:4:", 0) == 0);
  CHECK_THROWS_AS(ReadVectorsFile("/nonexistent/x.vec"), FormatError);
}

TEST_CASE("trials") {
  const TrialSet t = {{"a", "b", TrialLabel::kTarget},
                      {"a", "c", TrialLabel::kImpostor},
                      {"b", "c", TrialLabel::kUnknown}};
  std::stringstream ss;
  WriteTrials(ss, t);
  CHECK(ss.str() == "a b tar\na c non\nb c unk\n");
  const TrialSet back = ReadTrials(ss, "t");
  REQUIRE(back.size() == 3);
  CHECK(back[1].label == TrialLabel::kImpostor);
  std::istringstream bad("a b maybe\n");
  CHECK(ErrorOf([&] { ReadTrials(bad, "t.trl"); }).rfind("t.trl:1:", 0) == 0);
  std::istringstream empty("");
  CHECK(ReadTrials(empty, "t").empty());
}

TEST_CASE("scores") {
  ScoreSet s = {{{"a", "b", TrialLabel::kUnknown}, 1.0 / 3.0, 100},
                {{"a", "c", TrialLabel::kUnknown}, -12345.678901, 100}};
  std::stringstream ss;
  WriteScores(ss, s);
  CHECK(ss.str() == "a b 0.333333333\na c -12345.6789\n");
  const ScoreSet back = ReadScores(ss, "s");
  REQUIRE(back.size() == 2);
  CHECK(back[0].score == 0.333333333);
  std::istringstream nan_line("a b nan\n");
  CHECK_THROWS_AS(ReadScores(nan_line, "s"), FormatError);

  const TrialSet trials = {{"a", "c", TrialLabel::kImpostor},
                           {"a", "b", TrialLabel::kTarget},
                           {"x", "y", TrialLabel::kUnknown}};
  std::vector<double> sc;
  std::vector<bool> tar;
  MatchScoresToTrials(back, trials, &sc, &tar);
  REQUIRE(sc.size() == 2);
  CHECK(sc[0] == back[1].score);
  CHECK_FALSE(tar[0]);
  CHECK(tar[1]);
  const TrialSet missing = {{"q", "r", TrialLabel::kTarget}};
  CHECK_THROWS_AS(MatchScoresToTrials(back, missing, &sc, &tar), LookupError);
}

TEST_CASE("key-value files") {
  std::istringstream in("# comment\n  d_x = 4  \n\nbeta=0.5 # trailing\nname = a b\n");
  const KeyValues kv = ReadKeyValues(in, "c");
  CHECK(kv.at("d_x") == "4");
  CHECK(kv.at("beta") == "0.5");
  CHECK(kv.at("name") == "a b");
  std::istringstream no_eq("just words\n");
  CHECK(ErrorOf([&] { ReadKeyValues(no_eq, "c.cfg"); }).rfind("c.cfg:1:", 0) == 0);
  std::istringstream dup("a = 1\na = 2\n");
  CHECK_THROWS_AS(ReadKeyValues(dup, "c"), FormatError);
}
