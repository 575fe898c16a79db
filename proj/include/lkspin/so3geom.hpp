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

#include "lkspin/euler.hpp"

namespace lkspin {

// Left-invariant metric g_{xi,s} on SO(3): xi^2 on the two directions
// orthogonal to the spin axis, s^2 along it. xi > 0, s != 0.
struct LeftInvariantMetric {
    double xi = 1.0;
    double s = 1.0;

    static LeftInvariantMetric standard() { return {1.0, 1.0}; }
};

// Throws DomainError unless xi > 0 and s != 0.
void validate(const LeftInvariantMetric& g);

// Chart tensors below are in coordinates (phi, theta, psi) and throw
// SingularChartError when sin(theta) vanishes (to 1e-12).
Mat3 gram(const LeftInvariantMetric& g, double theta);
Mat3 gram_inverse(const LeftInvariantMetric& g, double theta);
double volume_element(const LeftInvariantMetric& g, double theta);

// Gamma^k_{ij}, stored as upper[k](i, j).
struct Christoffel {
    std::array<Mat3, 3> upper;
    double operator()(int k, int i, int j) const { return upper[k](i, j); }
};
Christoffel christoffel(const LeftInvariantMetric& g, double theta);

// R^m_{ijk} = d_i Gamma^m_{jk} - d_j Gamma^m_{ik} + Gamma^m_{ih} Gamma^h_{jk} - Gamma^m_{jh} Gamma^h_{ik}.
struct Riemann13 {
    std::array<double, 81> data{};
    double& at(int m, int i, int j, int k) { return data[27 * m + 9 * i + 3 * j + k]; }
    double operator()(int m, int i, int j, int k) const { return data[27 * m + 9 * i + 3 * j + k]; }
};
Riemann13 riemann13(const LeftInvariantMetric& g, double theta);

// Fully covariant tensor R_{ijkl} = R^m_{ijk} g_{lm} on antisymmetric pairs,
// rows and columns ordered (phi theta), (phi psi), (theta psi).
Mat3 riemann04(const LeftInvariantMetric& g, double theta);

// R_{ijkl} from the pair matrix, for any index quadruple.
double riemann04_component(const Mat3& pairs, int i, int j, int k, int l);

// Constant: 2/xi^2 - s^2/(2 xi^4).
double scalar_curvature(const LeftInvariantMetric& g);

enum class CoordinatePlane { PhiTheta, PhiPsi, ThetaPsi };

double sectional_curvature(const LeftInvariantMetric& g, double theta, CoordinatePlane plane);

// Sectional curvature of span(u, v) at the chart point with the given theta.
double sectional_curvature(const LeftInvariantMetric& g, double theta, const Vec3& u, const Vec3& v);

// Lipschitz-Killing curvatures (L0, L1, L2, L3) of (SO(3), g).
std::array<double, 4> lk_so3(const LeftInvariantMetric& g);

} // namespace lkspin
