// Copyright 2026 The pqsim Authors
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

#include <stdexcept>
#include <string>

namespace pqsim {

// Rejected run parameters: out-of-range rates, incompatible step sizes,
// malformed config files. CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operator handed to a strong-type constructor fails its structural
// invariants (hermiticity, trace, spectrum) beyond repair tolerance.
class InvalidState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Conditioning denominator Tr(rho E) fell below the configured guard:
// the preparation and the retrodicted effect are (numerically) mutually
// exclusive at this point, so the conditional value is undefined.
class SingularConditioning : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No sampled trajectory satisfied the requested selection.
class EmptySelection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver or cross-check produced values outside certified tolerances.
// CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failure while reading inputs or emitting artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pqsim
