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

#include <array>
#include <iosfwd>
#include <vector>

#include "lkspin/grid.hpp"

namespace lkspin {

// Triangulated level surface f = u in Euler-chart coordinates. Vertex
// coordinates are wrapped into the chart; edge vectors are taken with the
// shortest periodic difference.
struct LevelSurfaceMesh {
    double level = 0.0;
    std::vector<EulerPoint> vertices;
    std::vector<Vec3> normals; // outward unit normal -grad f/|grad f|_g, chart components
    std::vector<std::array<int, 3>> triangles;
    std::vector<double> areas; // metric area per triangle

    bool empty() const { return triangles.empty(); }
    double total_area() const;
};

// Threshold actually used for a grid: u, nudged upward by 1e-12 while any node equals it.
double regularized_level(const EulerGrid& grid, double u);

// Marching tetrahedra (6 per cell, split along the main diagonal) with
// linear interpolation on edges. Triangles are wound so their chart normal
// points toward {f < u}. Cells span theta in [theta_0, theta_{n-1}].
LevelSurfaceMesh extract_level_surface(const EulerGrid& grid, double u,
                                       const LeftInvariantMetric& g = LeftInvariantMetric::standard());

// Edge vector b - a with periodic phi and psi.
Vec3 chart_delta(const EulerPoint& a, const EulerPoint& b);

// Centroid of a mesh triangle, wrapped into the chart.
EulerPoint triangle_centroid(const LevelSurfaceMesh& mesh, std::size_t t);

// Metric area of the chart triangle (a, a + e1, a + e2) using the Gram matrix at theta.
double triangle_area(const Vec3& e1, const Vec3& e2, double theta, const LeftInvariantMetric& g);

// Undirected edges used by exactly one triangle. Empty for a closed surface.
std::vector<std::array<int, 2>> boundary_edges(const LevelSurfaceMesh& mesh);

// Edges used by more than two triangles, or twice with the same direction.
std::size_t inconsistent_edges(const LevelSurfaceMesh& mesh);

// Object File Format text; vertex coordinates are (phi, theta, psi).
void write_off(const LevelSurfaceMesh& mesh, std::ostream& out);

} // namespace lkspin
