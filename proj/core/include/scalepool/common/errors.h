// Copyright 2026 The Scalepool Authors.
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

#ifndef SCALEPOOL_COMMON_ERRORS_H_
#define SCALEPOOL_COMMON_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scalepool {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (negative increment, release
// of an unknown stream, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Malformed milli-value text.
class FormatError : public Error {
 public:
  FormatError(std::string token, const std::string& what)
      : Error(what + ": '" + token + "'"), token_(std::move(token)) {}
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

// Malformed exposition text. Line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const noexcept { return line_; }

 private:
  size_t line_;
};

// The balancer had no selectable server. Clients see a refused connection.
class NoEndpoint : public Error {
 public:
  using Error::Error;
};

// A service was asked for before it started.
class Unavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace scalepool

#endif  // SCALEPOOL_COMMON_ERRORS_H_
