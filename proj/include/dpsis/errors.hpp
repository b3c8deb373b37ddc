//
// Copyright 2026 The dpsis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPSIS_ERRORS_HPP_
#define DPSIS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dpsis {

// Precondition violations on caller-supplied arguments.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input files. Carries a 1-based file line and a column label when
// the failure can be pinned to a cell.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line = 0,
             std::string column = {})
      : std::runtime_error(msg), line_(line), column_(std::move(column)) {}

  std::size_t line() const { return line_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t line_;
  std::string column_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DPSIS_REQUIRE(cond, msg)                                  \
  do {                                                            \
    if (!(cond)) throw ::dpsis::InvalidArgument(std::string(msg)); \
  } while (0)

}  // namespace dpsis

#endif  // DPSIS_ERRORS_HPP_
