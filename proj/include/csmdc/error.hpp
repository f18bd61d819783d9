// Copyright 2026 The csmdc Authors.
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

#ifndef CSMDC_ERROR_HPP
#define CSMDC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace csmdc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter combination that violates an operation's preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Numerically degenerate input (zero column, zero reference signal, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

enum class ParseErrorKind {
  bad_magic,
  unsupported_version,
  truncated,
  inconsistent_length,
  invalid_field,
  trailing_bytes,
};

const char* to_string(ParseErrorKind kind) noexcept;

/// Rejected byte string. `kind` tells callers which check failed.
class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

}  // namespace csmdc

#endif  // CSMDC_ERROR_HPP
