// src/cli.cc

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

#include "vaeverif/cli.h"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "vaeverif/error.h"
#include "vaeverif/eval.h"
#include "vaeverif/io.h"
#include "vaeverif/model.h"
#include "vaeverif/plda.h"
#include "vaeverif/preprocess.h"
#include "vaeverif/scoring.h"
#include "vaeverif/synth.h"
#include "vaeverif/training.h"

namespace vaeverif {

namespace {

struct Options {
  // synth
  std::string spec_path, out_prefix;
  std::optional<std::uint64_t> synth_seed;
  // preprocess
  std::string fit_path, mode = "diag", apply_path, pipeline_out;
  std::optional<int> pca;
  bool no_length_norm = false;
  // train-vae / train-plda
  std::string config_path, train_path, dev_path, dev_trials_path, report_path;
  std::optional<std::uint64_t> train_seed;
  int plda_iters = 20;
  // score / eval / det
  std::string model_path, type = "vae", vectors_path, trials_path, scores_path;
  std::optional<int> k;
  bool symmetric = false;
  std::uint64_t score_seed = 1;
  double p_target = 0.001, c_miss = 1.0, c_fa = 1.0;
  std::string out_path;
};

void Labeled(const std::string &scores_path, const std::string &trials_path,
             std::vector<double> *values, std::vector<bool> *is_target) {
  const ScoreSet scores = ReadScoresFile(scores_path);
  const TrialSet trials = ReadTrialsFile(trials_path);
  MatchScoresToTrials(scores, trials, values, is_target);
}

void RunSynth(const Options &o) {
  CorpusSpec spec = ParseCorpusSpec(ReadKeyValuesFile(o.spec_path), o.spec_path);
  if (o.synth_seed) spec.seed = *o.synth_seed;
  const SyntheticCorpus c = GenTwoCovCorpus(spec);
  WriteVectorsFile(o.out_prefix + ".train.vec", c.train);
  if (spec.n_dev_speakers > 0) {
    WriteVectorsFile(o.out_prefix + ".dev.vec", c.dev);
    WriteTrialsFile(o.out_prefix + ".dev.trl", c.dev_trials);
  }
  if (spec.n_test_speakers > 0) {
    WriteVectorsFile(o.out_prefix + ".test.vec", c.test);
    WriteTrialsFile(o.out_prefix + ".test.trl", c.test_trials);
  }
}

void RunPreprocess(const Options &o) {
  const VectorSet train = ReadVectorsFile(o.fit_path);
  VectorSet target = ReadVectorsFile(o.apply_path);
  if (target.dim != train.dim)
    throw ShapeError(o.apply_path + ": dimension " + std::to_string(target.dim) +
                     " does not match " + o.fit_path + " (" +
                     std::to_string(train.dim) + ")");
  const Pipeline p =
      FitPipeline(train.vectors, ParseMode(o.mode), o.pca, !o.no_length_norm);
  VectorSet out;
  out.dim = p.OutDim();
  for (std::size_t i = 0; i < target.size(); ++i)
    out.Add(target.ids[i], target.speakers[i], Apply(p, target.vectors[i]));
  WriteVectorsFile(o.out_path, out);
  if (!o.pipeline_out.empty()) {
    std::ofstream os = OpenOutput(o.pipeline_out);
    WritePipeline(os, p);
  }
}

void RunTrainVae(const Options &o) {
  VaeConfig config =
      ParseTrainConfig(ReadKeyValuesFile(o.config_path), o.config_path);
  if (o.train_seed) config.seed = *o.train_seed;
  const VectorSet train = ReadVectorsFile(o.train_path);
  if (train.dim != config.d_x)
    throw ShapeError(o.train_path + ": vectors have dimension " +
                     std::to_string(train.dim) + " but " + o.config_path +
                     " sets d_x = " + std::to_string(config.d_x));
  std::optional<DevSet> dev;
  if (!o.dev_path.empty()) {
    dev = DevSet{ReadVectorsFile(o.dev_path), ReadTrialsFile(o.dev_trials_path)};
    if (dev->vectors.dim != config.d_x)
      throw ShapeError(o.dev_path + ": dimension does not match d_x");
  }
  const FitResult fit = Fit(train.vectors, dev, config);
  WriteModelFile(o.out_path, fit.model);
  if (!o.report_path.empty()) {
    std::ofstream os = OpenOutput(o.report_path);
    fit.report.WriteCsv(os);
  }
}

void RunTrainPlda(const Options &o) {
  const VectorSet train = ReadVectorsFile(o.train_path);
  const PldaTwoCov model = FitTwoCov(train, ParseMode(o.mode), o.plda_iters);
  std::ofstream os = OpenOutput(o.out_path);
  WritePlda(os, model);
}

void RunScore(const Options &o) {
  const VectorSet vectors = ReadVectorsFile(o.vectors_path);
  const TrialSet trials = ReadTrialsFile(o.trials_path);
  ScoreSet scores;
  if (o.type == "vae") {
    const VaeModel model = ReadModelFile(o.model_path);
    if (model.config.d_x != vectors.dim)
      throw ShapeError(o.vectors_path + ": dimension does not match model " +
                       o.model_path);
    scores = ScoreTrials(trials, vectors, model, o.k.value_or(100),
                         o.score_seed, o.symmetric);
  } else {
    std::ifstream is = OpenInput(o.model_path);
    const PldaTwoCov model = ReadPlda(is, o.model_path);
    if (model.Dim() != vectors.dim)
      throw ShapeError(o.vectors_path + ": dimension does not match model " +
                       o.model_path);
    scores = ScorePldaTrials(trials, vectors, model);
  }
  WriteScoresFile(o.out_path, scores);
}

void RunEval(const Options &o) {
  std::vector<double> values;
  std::vector<bool> is_target;
  Labeled(o.scores_path, o.trials_path, &values, &is_target);
  CostParams costs;
  costs.p_target = o.p_target;
  costs.c_miss = o.c_miss;
  costs.c_fa = o.c_fa;
  costs.Validate();
  const EerResult eer = ComputeEer(values, is_target);
  const MinDcfResult dcf = ComputeMinDcf(values, is_target, costs);
  std::ofstream os = OpenOutput(o.out_path);
  WriteMetricsCsv(os, eer, dcf);
}

void RunDet(const Options &o) {
  std::vector<double> values;
  std::vector<bool> is_target;
  Labeled(o.scores_path, o.trials_path, &values, &is_target);
  std::ofstream os = OpenOutput(o.out_path);
  WriteDetCsv(os, DetPoints(values, is_target));
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"VAE and PLDA embedding verification toolkit", "vaeverif"};
  app.require_subcommand(1, 1);
  Options o;

  CLI::App *synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--spec", o.spec_path, "Corpus description (key=value)")
      ->required();
  synth->add_option("--out-prefix", o.out_prefix,
                    "Writes PREFIX.{train,dev,test}.vec and PREFIX.{dev,test}.trl")
      ->required();
  synth->add_option("--seed", o.synth_seed,
                    "Overrides the seed in the corpus file (default 1)");

  CLI::App *prep = app.add_subcommand("preprocess",
                                      "Fit whitening/PCA/length norm and apply");
  prep->add_option("--fit", o.fit_path, "Vectors to fit on")->required();
  prep->add_option("--mode", o.mode, "Whitening mode")
      ->check(CLI::IsMember({"diag", "full"}))
      ->capture_default_str();
  prep->add_option("--pca", o.pca, "Keep the top P components")
      ->check(CLI::PositiveNumber);
  prep->add_flag("--no-length-norm", o.no_length_norm,
                 "Skip length normalization");
  prep->add_option("--apply", o.apply_path, "Vectors to transform")->required();
  prep->add_option("--out", o.out_path, "Transformed vectors")->required();
  prep->add_option("--save-pipeline", o.pipeline_out,
                   "Also write the fitted pipeline");

  CLI::App *tvae = app.add_subcommand("train-vae", "Train a VAE");
  tvae->add_option("--config", o.config_path, "Training config (key=value)")
      ->required();
  tvae->add_option("--train", o.train_path, "Training vectors")->required();
  CLI::Option *dev_opt =
      tvae->add_option("--dev", o.dev_path, "Dev vectors for early stopping");
  CLI::Option *dev_trl =
      tvae->add_option("--dev-trials", o.dev_trials_path, "Dev trial list");
  dev_opt->needs(dev_trl);
  dev_trl->needs(dev_opt);
  tvae->add_option("--seed", o.train_seed,
                   "Overrides the config's seed (config default 1)");
  tvae->add_option("--report", o.report_path, "Training report CSV");
  tvae->add_option("--out", o.out_path, "Model file")->required();

  CLI::App *tplda = app.add_subcommand("train-plda", "Train a two-covariance PLDA");
  tplda->add_option("--train", o.train_path, "Labeled training vectors")
      ->required();
  tplda->add_option("--mode", o.mode, "Covariance mode")
      ->check(CLI::IsMember({"diag", "full"}))
      ->capture_default_str();
  tplda->add_option("--iters", o.plda_iters, "EM iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  tplda->add_option("--out", o.out_path, "Model file")->required();

  CLI::App *score = app.add_subcommand("score", "Score a trial list");
  score->add_option("--model", o.model_path, "Model file")->required();
  score->add_option("--type", o.type, "Model type")
      ->check(CLI::IsMember({"vae", "plda"}))
      ->capture_default_str();
  score->add_option("--vectors", o.vectors_path, "Vectors")->required();
  score->add_option("--trials", o.trials_path, "Trial list")->required();
  score->add_option("--k", o.k, "Importance samples per marginal (default 100)")
      ->check(CLI::PositiveNumber);
  score->add_flag("--symmetric", o.symmetric, "Symmetrized VAE LLR");
  score->add_option("--seed", o.score_seed, "Scoring seed")
      ->capture_default_str();
  score->add_option("--out", o.out_path, "Score file")->required();

  CLI::App *eval = app.add_subcommand("eval", "EER and minDCF report");
  eval->add_option("--scores", o.scores_path, "Score file")->required();
  eval->add_option("--trials", o.trials_path, "Labeled trial list")->required();
  eval->add_option("--p-target", o.p_target, "Target prior")
      ->capture_default_str();
  eval->add_option("--c-miss", o.c_miss, "Miss cost")->capture_default_str();
  eval->add_option("--c-fa", o.c_fa, "False-alarm cost")->capture_default_str();
  eval->add_option("--out", o.out_path, "Report CSV")->required();

  CLI::App *det = app.add_subcommand("det", "DET curve points");
  det->add_option("--scores", o.scores_path, "Score file")->required();
  det->add_option("--trials", o.trials_path, "Labeled trial list")->required();
  det->add_option("--out", o.out_path, "DET CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    const CLI::App *sub = app.get_subcommands().empty()
                              ? &app
                              : app.get_subcommands().front();
    out << sub->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (synth->parsed()) RunSynth(o);
    else if (prep->parsed()) RunPreprocess(o);
    else if (tvae->parsed()) RunTrainVae(o);
    else if (tplda->parsed()) RunTrainPlda(o);
    else if (score->parsed()) RunScore(o);
    else if (eval->parsed()) RunEval(o);
    else if (det->parsed()) RunDet(o);
  } catch (const NumericError &e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DomainError &e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace vaeverif
