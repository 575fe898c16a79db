/*
   Copyright 2026 The lkspin Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace lkspin {

// Invalid mathematical input (bad index, non-positive parameter, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid run configuration (resolution too small, malformed spectrum file).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Point lies on the Euler chart boundary, where sin(theta) = 0.
class SingularChartError : public DomainError {
public:
    using DomainError::DomainError;
};

// Gradient vanishes at the evaluation point; the level set is not regular there.
class DegeneratePointError : public DomainError {
public:
    using DomainError::DomainError;
};

} // namespace lkspin
