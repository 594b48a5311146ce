// Copyright 2026 The TriggerBench Authors.
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

#ifndef TRIGGERBENCH_ERRORS_H_
#define TRIGGERBENCH_ERRORS_H_

#include <stdexcept>
#include <string>

namespace triggerbench {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values or experiment config files. The CLI maps this
// family to exit code 2; every other Error maps to 3.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input record; message carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// A value that parsed but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class EmptyCandidateError : public Error {
 public:
  using Error::Error;
};

class StealthViolationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch)
      : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

class PairingError : public Error {
 public:
  using Error::Error;
};

class RoleMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace triggerbench

#endif  // TRIGGERBENCH_ERRORS_H_
