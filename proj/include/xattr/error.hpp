// Copyright 2026 The xattr Authors.
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xattr {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input record violates a type invariant or the file schema.
class ValidationError : public Error {
 public:
  ValidationError(std::string field_path, const std::string& message)
      : Error(field_path.empty() ? message : field_path + ": " + message),
        field_path_(std::move(field_path)) {}

  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

// A metric has no defined value on its input (empty population, one class).
// Reports render these as absent, never as 0.
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

// An input file is missing or unreadable.
class InputFileError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Network-level failure after all retries were spent.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, int attempts)
      : Error(attempts > 0 ? message + " (after " + std::to_string(attempts) + " attempt" +
                                 (attempts == 1 ? "" : "s") + ")"
                           : message),
        attempts_(attempts) {}

  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

// The peer answered, but the body does not follow the wire protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// The peer answered with a score outside [0, 1].
class ScoreRangeError : public ProtocolError {
 public:
  explicit ScoreRangeError(double score)
      : ProtocolError("score out of range [0,1]: " + std::to_string(score)),
        score_(score) {}

  double score() const { return score_; }

 private:
  double score_;
};

}  // namespace xattr
