// include/vaeverif/cli.h

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

#ifndef VAEVERIF_CLI_H_
#define VAEVERIF_CLI_H_

#include <ostream>

namespace vaeverif {

// Exit codes of the command-line tool.
enum ExitCode {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumeric = 4,
};

// Runs one subcommand (synth, preprocess, train-vae, train-plda, score,
// eval, det).  Help goes to `out`, diagnostics and usage text to `err`.
int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err);

}  // namespace vaeverif

#endif  // VAEVERIF_CLI_H_
