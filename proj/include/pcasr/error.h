// pcasr/error.h

// Copyright 2026  The pcasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PCASR_ERROR_H_
#define PCASR_ERROR_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace pcasr {

// Base class for every error raised by the library. The CLI maps the
// subclasses below onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed punctuation or model configuration, or a request the configured
// model cannot serve (exit code 3).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Reference and hypothesis utterance ids do not line up (exit code 2).
class IdMismatchError : public Error {
 public:
  IdMismatchError(const std::string& what, std::vector<std::string> ids)
      : Error(what), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

// A JSON/JSONL input that does not follow its schema. line() is 1-based, 0
// when the error is not tied to a line.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

// A restorer failed on one utterance.
class RestoreError : public Error {
 public:
  RestoreError(const std::string& utterance_id, const std::string& what)
      : Error("restore failed for '" + utterance_id + "': " + what),
        utterance_id_(utterance_id) {}
  const std::string& utterance_id() const { return utterance_id_; }

 private:
  std::string utterance_id_;
};

// Training produced a non-finite loss (exit code 4).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::vector<double> last_losses)
      : Error(what), last_losses_(std::move(last_losses)) {}
  const std::vector<double>& last_finite_losses() const { return last_losses_; }

 private:
  std::vector<double> last_losses_;
};

}  // namespace pcasr

#endif  // PCASR_ERROR_H_
