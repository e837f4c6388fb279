// Copyright 2026 The matchdope Authors
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

namespace matchdope {

/// Bad user input: arguments out of range, incompatible options.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An iterative numerical procedure failed to reach its tolerance.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An internal invariant was violated. Always a bug.
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

inline void require(bool condition, const char* message) {
    if (!condition) {
        throw ConfigError(message);
    }
}

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ConfigError(message);
    }
}

inline void ensure(bool condition, const char* message) {
    if (!condition) {
        throw InvariantViolation(message);
    }
}

}  // namespace matchdope
