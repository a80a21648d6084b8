// Copyright 2026 The diffauction Authors
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

namespace diffauction {

// Malformed instance, config or command-line input. Carries a line number
// (0 when not line-oriented) and a field path such as "buyers[2].id".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line = 0,
             std::string field = {});

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// An operation was called outside its precondition (invalid buyer, n too
// large for exhaustive mode, bad generator parameters, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Value outside a distribution's support or virtual range.
class DomainError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace diffauction
