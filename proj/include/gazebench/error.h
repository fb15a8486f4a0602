// Copyright 2026 The GazeBench Authors.
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

#ifndef GAZEBENCH_ERROR_H_
#define GAZEBENCH_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gazebench {

// Malformed input file (bad JSON, wrong schema). Carries a 1-based location
// when one is known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0,
             std::size_t column = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) +
                                          ", column " +
                                          std::to_string(column) + ": " + what
                                    : what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}
  ValidationError(const std::string& what, std::vector<std::string> subjects)
      : std::invalid_argument(what), subjects_(std::move(subjects)) {}

  // Identifiers (scanpath ids, record indices) the error refers to.
  const std::vector<std::string>& subjects() const { return subjects_; }

 private:
  std::vector<std::string> subjects_;
};

// Failure talking to an external service after the retry policy gave up.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(const std::string& what, std::vector<std::string> attempts)
      : std::runtime_error(what), attempts_(std::move(attempts)) {}

  const std::vector<std::string>& attempts() const { return attempts_; }

 private:
  std::vector<std::string> attempts_;
};

}  // namespace gazebench

#endif  // GAZEBENCH_ERROR_H_
