// Copyright 2026 The dimred Authors
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

#ifndef DIMRED_ERROR_H_
#define DIMRED_ERROR_H_

#include <stdexcept>
#include <string>

namespace dimred {

// Base of every exception thrown by the library. `module()` names the
// component that raised it ("dataset", "criteria", ...) so callers can report
// provenance without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)) {}

  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

// Malformed input file.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line)
      : Error("dataset", message), line_(line) {}

  // 1-based line number in the input, 0 when not tied to a line.
  int line() const { return line_; }

 private:
  int line_;
};

// Invalid options or parameters supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A value outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Search refused or aborted (guard limits, loop detection).
class SearchError : public Error {
 public:
  explicit SearchError(const std::string& message) : Error("search", message) {}
};

}  // namespace dimred

#endif  // DIMRED_ERROR_H_
