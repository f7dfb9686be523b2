// Copyright 2026 The Authors.
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

#ifndef MMRSEL_ERRORS_HPP_
#define MMRSEL_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmrsel {

// Base for every data error raised by the library. The CLI maps these to
// exit code 1; ConfigError maps to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameter values (out-of-range lambda, zero batch size, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class BadMagic : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteEntry : public Error {
 public:
  NonFiniteEntry(std::size_t row, std::size_t col, const std::string& where = {})
      : Error((where.empty() ? std::string() : where + ": ") +
              "non-finite entry at row " + std::to_string(row) + ", column " +
              std::to_string(col)),
        row_(row),
        col_(col) {}
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class NotNormalized : public Error {
 public:
  using Error::Error;
};

// Manifest errors carry the 1-based line number.
class ManifestError : public Error {
 public:
  ManifestError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateId : public ManifestError {
 public:
  DuplicateId(const std::string& id, std::size_t line, const std::string& where = {})
      : ManifestError((where.empty() ? std::string() : where + ": ") +
                          "duplicate utterance id \"" + id + "\"",
                      line),
        id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class NonPositiveDuration : public ManifestError {
 public:
  using ManifestError::ManifestError;
};

class MalformedLine : public ManifestError {
 public:
  using ManifestError::ManifestError;
};

class InvalidDims : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class TooFewRows : public Error {
 public:
  using Error::Error;
};

class EmptyTargets : public Error {
 public:
  using Error::Error;
};

class EmptyTargetSet : public Error {
 public:
  using Error::Error;
};

class MissingView : public Error {
 public:
  explicit MissingView(const std::string& name)
      : Error("missing embedding view \"" + name + "\""), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class EmptySelection : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class DegenerateSplit : public Error {
 public:
  using Error::Error;
};

}  // namespace mmrsel

#endif  // MMRSEL_ERRORS_HPP_
