// include/vaeverif/error.h

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

#ifndef VAEVERIF_ERROR_H_
#define VAEVERIF_ERROR_H_

#include <stdexcept>
#include <string>

namespace vaeverif {

// Base of every error thrown by the library.  The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector/matrix dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a density or transform
// (e.g. nonpositive precision).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite intermediate, singular covariance, failed decomposition.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed file or unparsable value.  Messages carry file and line.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Id referenced by a trial list is missing from the vector table.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Input violates an operation's preconditions (empty data, too few
// speakers, invalid config values).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace vaeverif

#endif  // VAEVERIF_ERROR_H_
