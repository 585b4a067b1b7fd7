// Copyright 2026 The Synthmark Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace synthmark {

// Input that violates a documented precondition: bad schema, bad CSV cell,
// unknown column, malformed plan/rules/config. CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A synthetic table needed by a measurement is not in the store. CLI exit
// code 3.
class MissingTableError : public std::runtime_error {
 public:
  explicit MissingTableError(std::string key)
      : std::runtime_error("missing synthetic table: " + key),
        key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Numerical input on which a metric is undefined (one-class pooled data,
// too few non-degenerate columns, empty groups).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace synthmark
