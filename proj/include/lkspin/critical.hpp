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

#include <cstddef>
#include <vector>

#include "lkspin/grid.hpp"

namespace lkspin {

struct CriticalPoint {
    EulerPoint point;
    double value = 0.0;
    int index = 0;            // number of negative Hessian eigenvalues
    double min_abs_eigen = 0; // smallest |eigenvalue| of the chart Hessian
};

struct CriticalSet {
    std::vector<CriticalPoint> points; // sorted by (theta, phi, psi)
    std::size_t candidate_cells = 0;
    std::size_t flagged_cells = 0;     // candidate cells left unresolved
    std::size_t degenerate_points = 0; // near-singular Hessian

    bool reliable() const { return flagged_cells == 0 && degenerate_points == 0; }
};

// Chart-gradient zeros: cells whose corner gradients change sign in every
// component and whose trilinear gradient interpolant has a zero are refined by
// Newton on the analytic jet. The grid must carry gradients.
CriticalSet find_critical_points(const ChartField& field, const EulerGrid& grid, int threads = 1);

// Sum of (-1)^(3 - index) over critical points with value >= u.
int morse_count(const CriticalSet& set, double u);

struct MorseEstimate {
    int value = 0;
    bool reliable = true;
};

MorseEstimate estimate_L0_morse(const CriticalSet& set, double u);
MorseEstimate estimate_L0_morse(const ChartField& field, const EulerGrid& grid, double u);

} // namespace lkspin
