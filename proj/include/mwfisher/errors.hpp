// Copyright 2026 The mwfisher Authors
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

namespace mwfisher {

/// Which structural invariant an input violated. The CLI maps each one to a
/// distinct exit code.
enum class Invariant {
    normalization,
    hermiticity,
    trace,
    positivity,
    dimension,
    subset,
    isometry,
    support,
};

inline const char *invariant_name(Invariant which) {
    switch (which) {
        case Invariant::normalization: return "normalization";
        case Invariant::hermiticity: return "hermiticity";
        case Invariant::trace: return "unit trace";
        case Invariant::positivity: return "positive semidefiniteness";
        case Invariant::dimension: return "dimension";
        case Invariant::subset: return "party subset";
        case Invariant::isometry: return "isometry";
        case Invariant::support: return "support";
    }
    return "unknown";
}

class InvariantError : public std::invalid_argument {
   public:
    InvariantError(Invariant which, const std::string &message)
        : std::invalid_argument(std::string(invariant_name(which)) + " violated: " + message), which_(which) {}

    Invariant which() const noexcept { return which_; }

   private:
    Invariant which_;
};

/// A numeric parameter (noise strength, grid point, probability, count) lies
/// outside its admissible range.
class RangeError : public std::out_of_range {
   public:
    using std::out_of_range::out_of_range;
};

/// Malformed input document (bad JSON, missing keys, wrong shapes).
class ParseError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace mwfisher
