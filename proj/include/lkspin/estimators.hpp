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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lkspin/critical.hpp"
#include "lkspin/mesh.hpp"
#include "lkspin/spinfield.hpp"

namespace lkspin {

struct LKVector {
    std::array<double, 4> values{};
    std::optional<std::array<double, 4>> stderrs;
};

// Volume of {f >= u}: node indicator times cell volume.
double estimate_L3(const EulerGrid& grid, double u, const LeftInvariantMetric& g = LeftInvariantMetric::standard());

// Half the mesh area, each triangle measured with the Gram matrix at its centroid.
double estimate_L2(const LevelSurfaceMesh& mesh);

// Half the area of {f = u} from analytic crossings along psi-lines:
// area = int sin(theta) sum_{crossings} |grad f|_g / |d_psi f| dphi dtheta,
// on a base_phi x base_theta grid. The integrand has an inverse square-root
// singularity on the fold where psi-lines are tangent to the surface; it is
// integrated in closed form per cell, and cells the fold crosses are halved up
// to max_depth times. Independent of the mesh.
double estimate_L2_crossings(const FieldRealization& field, double u, int base_phi, int base_theta,
                             int max_depth = 3);

// Mean curvature of the level surface through p with respect to its outer
// normal (pointing toward {f < f(p)}). Throws DegeneratePointError when
// |grad f|_g <= eps_grad.
double mean_out_curvature(const FieldJet& jet, double theta, const LeftInvariantMetric& g, double eps_grad);
double mean_out_curvature(const ChartField& field, const EulerPoint& p,
                          const LeftInvariantMetric& g = LeftInvariantMetric::standard(), double eps_grad = -1.0);

// Intrinsic Gaussian curvature of the level surface: det of the second
// fundamental form plus the ambient sectional curvature of the tangent plane.
double level_gauss_curvature(const FieldJet& jet, double theta, const LeftInvariantMetric& g, double eps_grad);

struct LevelProjection {
    EulerPoint point;
    double distance = 0.0; // metric path length, positive when f(p) > u
};

// Newton steps along the metric gradient from p toward {f = u}; each step is
// capped at max_step in every chart coordinate.
LevelProjection project_to_level(const ChartField& field, EulerPoint p, double u, const LeftInvariantMetric& g,
                                 double max_step);

struct SurfaceIntegrals {
    double area = 0.0;            // mesh area
    double surface_area = 0.0;    // projected area of the non-skipped triangles on the level set
    double mean_curvature = 0.0;  // sum H dA
    double gauss_curvature = 0.0; // sum kappa dA
    double skipped_area = 0.0;
    std::size_t skipped_triangles = 0;

    double skipped_fraction() const { return area > 0.0 ? skipped_area / area : 0.0; }
    SurfaceIntegrals& operator+=(const SurfaceIntegrals& o);
};

// Near theta = 0 and pi the chart gradient of a smooth field shrinks like sin(theta),
// so level surfaces crossing those circles are poorly resolved by the grid. A
// second chart y = P^{-1} x with P = R2(pi/2) puts them on its equator; the field
// there is y -> f(P y). Triangles are weighted by a partition of unity.
inline const EulerPoint kSecondChart{0.0, 1.5707963267948966, 0.0};

enum class ChartRole {
    Whole,     // weight 1 everywhere
    Primary,   // weight primary_chart_weight(theta)
    Secondary, // weight 1 - primary_chart_weight(theta of P y), mesh taken in the second chart
};

// Smooth weight in [0, 1] of the primary chart: 0 within pi/6 of a pole, 1
// beyond pi/4, a sin^2 ramp between.
double primary_chart_weight(double theta);

// Curvature integrands evaluated from the field at each triangle centroid,
// projected onto the level set, and weighted by the projected triangle area
// times the chart weight for role. Zero-weight triangles are not evaluated.
SurfaceIntegrals integrate_surface(const ChartField& field, const LevelSurfaceMesh& mesh,
                                   const LeftInvariantMetric& g = LeftInvariantMetric::standard(),
                                   double eps_grad = -1.0, int threads = 1, ChartRole role = ChartRole::Whole);

// Half the level-set area from projected triangle areas (see integrate_surface).
double estimate_L2(const SurfaceIntegrals& s);

// Surface integrals of {f = u} on a grid, assembled from the field's chart and,
// when the field can be left-translated, the second chart sampled at the same
// resolution.
class SurfaceIntegrator {
public:
    SurfaceIntegrator(const ChartField& field, const EulerGrid& grid, bool two_charts = true, int threads = 1);

    bool two_charts() const { return second_ != nullptr; }
    SurfaceIntegrals integrate(double u, const LeftInvariantMetric& g = LeftInvariantMetric::standard()) const;

private:
    const ChartField& field_;
    const EulerGrid& grid_;
    std::unique_ptr<ChartField> second_;
    std::optional<EulerGrid> second_grid_;
    int threads_;
};

struct L1Estimate {
    double value = 0.0;
    double boundary_term = 0.0; // -(1/pi) sum H dA
    double volume_term = 0.0;   // (1/4pi) scal * L3
    double skipped_area_fraction = 0.0;
};

L1Estimate estimate_L1(const SurfaceIntegrals& s, double l3, const LeftInvariantMetric& g = LeftInvariantMetric::standard());
L1Estimate estimate_L1(const ChartField& field, const LevelSurfaceMesh& mesh, const EulerGrid& grid, double u);

struct L0Estimate {
    double value = 0.0;
    double skipped_area_fraction = 0.0;
};

L0Estimate estimate_L0_gaussbonnet(const SurfaceIntegrals& s);
L0Estimate estimate_L0_gaussbonnet(const ChartField& field, const LevelSurfaceMesh& mesh);

// Skipped-area fraction above which a realization is flagged.
inline constexpr double kMaxSkippedAreaFraction = 1e-4;

enum class L0Method { GaussBonnet, Morse };
enum class L2Method { Mesh, Crossings };

std::string to_string(L0Method m);
std::string to_string(L2Method m);
L0Method l0_method_from_string(const std::string& name);
L2Method l2_method_from_string(const std::string& name);

struct EstimatorOptions {
    L0Method l0 = L0Method::GaussBonnet;
    L2Method l2 = L2Method::Mesh;
    bool morse = true;      // also run the critical point count
    bool two_charts = true; // surface integrals from both charts when the field can be translated
    int threads = 1;
};

struct EstimatorReport {
    double u = 0.0;
    double L0_gb = 0.0;
    std::optional<int> L0_morse;
    double L1 = 0.0;
    double L1_boundary = 0.0;
    double L2 = 0.0;
    double L3 = 0.0;
    double skipped_area_fraction = 0.0;
    bool reliable = true;
    std::vector<std::string> flags;

    // The four estimates with L0 and L2 taken from the chosen methods.
    LKVector lk(const EstimatorOptions& opt) const;
};

nlohmann::json to_json(const EstimatorReport& r);

// All estimators on one grid at each threshold. Crossing-based L2 needs a
// FieldRealization; the base grid is twice the chart grid in phi and theta.
std::vector<EstimatorReport> estimate_all(const ChartField& field, const EulerGrid& grid,
                                          const std::vector<double>& thresholds, const EstimatorOptions& opt = {});

} // namespace lkspin
