// Copyright 2026 The qspring Authors
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

namespace qspring {

/// Invalid physical input. `field()` carries the dotted path of the
/// offending parameter when one is known (e.g. "membrane.reflectivity").
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
  DomainError(std::string field, const std::string& what)
      : std::domain_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Integration diverged or a steady state was requested for an unstable drift.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fock-space truncation too small for the state being represented.
class TruncationError : public DomainError {
 public:
  using DomainError::DomainError;
};

namespace detail {

inline void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw DomainError(field, what);
}

inline void require_positive(double v, const char* field) {
  if (!(v > 0.0)) throw DomainError(field, "must be strictly positive (got " + std::to_string(v) + ")");
}

}  // namespace detail
}  // namespace qspring
