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

#include <iosfwd>
#include <string>
#include <vector>

#include "lkspin/grid.hpp"
#include "lkspin/spinfield.hpp"

namespace lkspin {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBreach = 2;

// "a:b:step" (endpoints included within 1e-12), "a,b,c" or a single value.
// Values are a + k step, not accumulated sums. Throws ConfigError.
std::vector<double> parse_range(const std::string& text);

// "n" for a cube or "n_phi x n_theta x n_psi" written "AxBxC".
Resolution parse_resolution(const std::string& text);

// "reference", "d1-reference" or the path of a spectrum JSON file
// {"s": 2, "coeffs": {"2": 0.5, ...}}; file spectra are normalized.
SpectrumSpec load_spectrum(const std::string& name);

// Runs one command. args excludes the program name. Results go to out
// unless --output names a file; diagnostics and usage go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lkspin
