// Copyright 2026 The viewsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VIEWSIM_ERRORS_H_
#define VIEWSIM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace viewsim {

// Base class for every error raised by the library. Callers that only care
// about "something went wrong" can catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// An estimator was given too little data (e.g. an empty sample set).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// A file did not have the expected layout (header, column set).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A field could not be parsed. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Training labels contained a single class.
class DegenerateLabelsError : public Error {
 public:
  using Error::Error;
};

// Normal equations could not be solved.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

// A policy returned an action outside [0, 1].
class PolicyContractError : public Error {
 public:
  using Error::Error;
};

// A run configuration was malformed: unknown key, wrong type, bad value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace viewsim

#endif  // VIEWSIM_ERRORS_H_
