// Copyright 2026 The rsep Authors
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

namespace rsep {

/// Bad arguments: dimension mismatches, out-of-range indices, malformed input.
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An input violates a value-level invariant (Hermiticity, normalization,
/// POVM completeness, basis orthogonality).
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The site-map dimension constraint d >= 2^v is violated, or an interior
/// state is not strictly inside the dual.
class ConstraintError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A construction could not be completed (degenerate norm, retry exhaustion,
/// problem too large for exact enumeration).
class ConstructionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A normalized site operator produced an outcome probability outside [0,1].
class PositivityViolation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The edge-index distribution does not factorize, so the product sampler
/// cannot be used.
class UnsupportedInstance : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace rsep
