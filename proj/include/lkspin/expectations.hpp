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
#include <cstdint>
#include <functional>
#include <string>

#include "lkspin/euler.hpp"

namespace lkspin {

// Eigenvalues of the field-induced metric relative to the ambient metric.
struct Eigentriple {
    double a1 = 1.0;
    double a2 = 1.0;
    double a3 = 1.0;
};

void validate(const Eigentriple& t);

enum class Regime { ExactClosedForm, Quadrature, Asymptotic };
std::string to_string(Regime r);

// Expected (L0, L1, L2, L3) of the excursion set {f >= u}.
struct ExpectedLK {
    double u = 0.0;
    std::array<double, 4> values{};
    Regime regime = Regime::ExactClosedForm;
    double residual = 0.0;  // last relative change of an adaptive quadrature
    bool converged = true;
};

double gaussian_cdf(double u);

// E1 and E2 by product quadrature on the unit sphere (Gauss-Legendre in
// cos(theta), trapezoid in phi), doubling the order until both change by at
// most rel_tol.
struct SphereQuadrature {
    double e1 = 0.0;
    double e2 = 0.0;
    double residual = 0.0;
    int order = 0;
    bool converged = false;
};
SphereQuadrature e_functions_quadrature(const Eigentriple& t, double rel_tol = 1e-9);
double E1(const Eigentriple& t);
double E2(const Eigentriple& t);

// Plain Monte Carlo of the Gaussian expectations, for cross-checks.
struct EMonteCarlo {
    double e1 = 0.0, e1_stderr = 0.0;
    double e2 = 0.0, e2_stderr = 0.0;
};
EMonteCarlo e_functions_monte_carlo(const Eigentriple& t, std::uint64_t samples, std::uint64_t seed);

// E1, E2 at the spin eigentriple (xi^2, xi^2, s^2).
double E1_closed(double xi, double s);
double E2_closed(double xi, double s);

// Constants of the per-threshold densities. d1 carries the 1/sqrt(8 pi^3)
// normalization implied by the integral formulas; d1_text is the bracket and
// 1/sqrt(8 pi^2) prefactor as originally printed (xi > |s| only; otherwise
// the correct bracket with the same prefactor).
struct DConstants {
    double d0 = 0.0, d1 = 0.0, d1_text = 0.0, d2 = 0.0, d3 = 0.0;
};
DConstants d_constants(double xi, double s);

enum class Manifold { SO3, SU2 };

// Integral formulas specialised to constant eigentriple (xi^2, xi^2, s^2).
ExpectedLK expected_lk_spin(double xi, double s, double u, Manifold manifold = Manifold::SO3);

// Same quantities through the densities Xi_i(u) and L_i(SO(3)) of the
// standard metric. Throws DomainError at xi = |s|.
ExpectedLK expected_lk_densities(double xi, double s, double u, bool text_d1 = false);

// Pointwise data for the general integral formulas.
struct PointFields {
    Eigentriple a;
    double scal_g = 0.0;
    double scal_f = 0.0;
    double vol_element = 0.0; // dVol_g / (dphi dtheta dpsi)
};
using FieldsFunction = std::function<PointFields(const EulerPoint&)>;

// Integrates the four formulas over the Euler chart (Gauss-Legendre in theta,
// trapezoid in phi and psi), doubling the order until every value changes by
// at most rel_tol (relative to max(|value|, 1)).
ExpectedLK expected_lk_general(const FieldsFunction& fields, double u, double rel_tol = 1e-10,
                               int max_order = 64);

struct EuclideanLK {
    ExpectedLK lk;
    double gamma_sa = 0.0;
    double gamma_tmc = 0.0;
    double gamma_tgc = 0.0;
};
EuclideanLK expected_lk_euclidean(const Eigentriple& t, double u, double volume);

// Leading-order large-mu behaviour, mu = xi^2 |s| / 5, with Lipschitz-Killing
// curvatures taken with respect to 2g.
ExpectedLK asymptotic_lk(double mu, double s, double u);

// L_j^{2g} = 2^{j/2} L_j and its inverse.
std::array<double, 4> to_2g(const std::array<double, 4>& lk);
std::array<double, 4> from_2g(const std::array<double, 4>& lk);

// Gaussian kinematic formula for a unit-variance field that is isotropic with
// respect to a metric in which M has curvatures lk_f.
std::array<double, 4> adler_taylor_lk(const std::array<double, 4>& lk_f, double u);

// xi = |s|: E L_j = xi^{-j} E L_j^f with lk_f the curvatures of (SO(3), xi^2 g).
ExpectedLK expected_lk_homothetic(double xi, double u);

struct WaveParams {
    double xi2 = 0.0;
    double s2 = 0.0;
};
WaveParams wave_params(int l);
double berger_eigenvalue(int l, int s, double t);

// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

} // namespace lkspin
