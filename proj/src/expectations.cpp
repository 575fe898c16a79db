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

#include "lkspin/expectations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "lkspin/errors.hpp"
#include "lkspin/quadrature.hpp"
#include "lkspin/rng.hpp"
#include "lkspin/so3geom.hpp"

namespace lkspin {

namespace {

constexpr double pi = std::numbers::pi;
const double kChi3Mean = 2.0 * std::sqrt(2.0 / pi);

void check_spin_params(double xi, double s) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("xi must be positive");
    if (s == 0.0 || !std::isfinite(s)) throw DomainError("s must be nonzero");
}

bool at_branch_point(double xi, double s) { return std::abs(1.0 - s * s / (xi * xi)) < 1e-8; }

// E1(1, 1, 1/a) and E2(1, 1, 1/a) with a = xi^2 / s^2.
std::pair<double, double> unit_e_functions(double a) {
    const double sqrt2pi = std::sqrt(2.0 / pi);
    if (a > 1.0) {
        const double b = 1.0 - 1.0 / a, rb = std::sqrt(b);
        const double e1 = 1.0 + (1.0 / a) * (1.0 - (std::log(a) + 2.0 * std::log1p(rb)) / (2.0 * rb));
        const double e2 = sqrt2pi * (std::sqrt(1.0 / a) + std::asin(rb) / rb);
        return {e1, e2};
    }
    const double c = 1.0 / a - 1.0, rc = std::sqrt(c);
    const double e1 = 1.0 + (1.0 / a) * (1.0 - std::atan(rc) / rc);
    const double e2 = sqrt2pi * (std::sqrt(1.0 / a) + std::asinh(rc) / rc);
    return {e1, e2};
}

double rel_change(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

std::array<double, 4> scaled(std::array<double, 4> v, double k) {
    for (double& x : v) x *= k;
    return v;
}

} // namespace

void validate(const Eigentriple& t) {
    if (!(t.a1 > 0.0) || !(t.a2 > 0.0) || !(t.a3 > 0.0) || !std::isfinite(t.a1) || !std::isfinite(t.a2) ||
        !std::isfinite(t.a3)) {
        throw DomainError("eigentriple entries must be positive and finite");
    }
}

std::string to_string(Regime r) {
    switch (r) {
    case Regime::ExactClosedForm: return "exact-closed-form";
    case Regime::Quadrature: return "quadrature";
    case Regime::Asymptotic: return "asymptotic";
    }
    return "unknown";
}

double gaussian_cdf(double u) { return normal_cdf(u); }

SphereQuadrature e_functions_quadrature(const Eigentriple& t, double rel_tol) {
    validate(t);
    SphereQuadrature out;
    double prev1 = 0.0, prev2 = 0.0;
    for (int n = 8; n <= 2048; n *= 2) {
        const QuadratureRule q = gauss_legendre(n);
        const int nphi = 2 * n;
        std::vector<double> c2(nphi), s2(nphi);
        for (int k = 0; k < nphi; ++k) {
            const double phi = 2.0 * pi * (k + 0.5) / nphi;
            c2[k] = std::cos(phi) * std::cos(phi);
            s2[k] = 1.0 - c2[k];
        }
        double i1 = 0.0, i2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = q.nodes[i], r2 = 1.0 - x * x;
            double row1 = 0.0, row2 = 0.0;
            for (int k = 0; k < nphi; ++k) {
                const double n1 = r2 * c2[k], n2 = r2 * s2[k], n3 = x * x;
                const double den = t.a1 * n1 + t.a2 * n2 + t.a3 * n3;
                row1 += (t.a1 * t.a1 * n1 + t.a2 * t.a2 * n2 + t.a3 * t.a3 * n3) / den;
                row2 += std::sqrt(den);
            }
            i1 += q.weights[i] * row1;
            i2 += q.weights[i] * row2;
        }
        // (1/4pi) * dphi-weight 2pi/nphi
        const double e1 = i1 / (2.0 * nphi);
        const double e2 = kChi3Mean * i2 / (2.0 * nphi);
        if (n > 8) {
            out.residual = std::max(rel_change(e1, prev1), rel_change(e2, prev2));
            out.e1 = e1;
            out.e2 = e2;
            out.order = n;
            if (out.residual <= rel_tol) {
                out.converged = true;
                return out;
            }
        }
        prev1 = e1;
        prev2 = e2;
    }
    return out;
}

double E1(const Eigentriple& t) { return e_functions_quadrature(t).e1; }
double E2(const Eigentriple& t) { return e_functions_quadrature(t).e2; }

EMonteCarlo e_functions_monte_carlo(const Eigentriple& t, std::uint64_t samples, std::uint64_t seed) {
    validate(t);
    if (samples < 2) throw DomainError("Monte Carlo needs at least two samples");
    const Philox gen(seed);
    double m1 = 0.0, q1 = 0.0, m2 = 0.0, q2 = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const std::uint32_t lo = static_cast<std::uint32_t>(i), hi = static_cast<std::uint32_t>(i >> 32);
        const auto [g1, g2] = gen.normals({lo, hi, 0xE12u, 0u});
        const auto [g3, unused] = gen.normals({lo, hi, 0xE12u, 1u});
        (void)unused;
        const double den = t.a1 * g1 * g1 + t.a2 * g2 * g2 + t.a3 * g3 * g3;
        const double x1 = (t.a1 * t.a1 * g1 * g1 + t.a2 * t.a2 * g2 * g2 + t.a3 * t.a3 * g3 * g3) / den;
        const double x2 = std::sqrt(den);
        // Welford updates
        const double k = static_cast<double>(i + 1);
        const double d1 = x1 - m1;
        m1 += d1 / k;
        q1 += d1 * (x1 - m1);
        const double d2 = x2 - m2;
        m2 += d2 / k;
        q2 += d2 * (x2 - m2);
    }
    const double n = static_cast<double>(samples);
    return {m1, std::sqrt(q1 / (n - 1) / n), m2, std::sqrt(q2 / (n - 1) / n)};
}

double E1_closed(double xi, double s) {
    check_spin_params(xi, s);
    if (at_branch_point(xi, s)) return xi * xi;
    return xi * xi * unit_e_functions(xi * xi / (s * s)).first;
}

double E2_closed(double xi, double s) {
    check_spin_params(xi, s);
    if (at_branch_point(xi, s)) return xi * kChi3Mean;
    return xi * unit_e_functions(xi * xi / (s * s)).second;
}

DConstants d_constants(double xi, double s) {
    check_spin_params(xi, s);
    if (at_branch_point(xi, s)) {
        throw DomainError("xi = |s|: the field is homothetic, use the Adler-Taylor path");
    }
    const double as = std::abs(s), s2 = s * s, x2 = xi * xi;
    DConstants d;
    const double bracket = 2.0 * x2 + s2 - E1_closed(xi, s);
    d.d1 = bracket / std::sqrt(8.0 * pi * pi * pi);
    d.d2 = as * x2 / (4.0 * pi * pi);
    if (xi > as) {
        const double rb = std::sqrt(1.0 - s2 / x2);
        d.d0 = (xi * std::asin(rb) / rb + as) / (2.0 * pi);
        const double printed = x2 + s2 / rb * std::log(xi) -
                               s2 * (std::log(as) / rb - std::log1p(rb) / (2.0 * rb));
        d.d1_text = printed / std::sqrt(8.0 * pi * pi);
        d.d3 = as * (1.0 - s2 / (4.0 * x2)) / (4.0 * pi * pi) - 3.0 / (8.0 * pi) * d.d0;
    } else {
        d.d0 = E2_closed(xi, s) / std::sqrt(8.0 * pi);
        d.d1_text = bracket / std::sqrt(8.0 * pi * pi);
        d.d3 = (2.0 * as * (1.0 - s2 / (4.0 * x2)) - 3.0 * pi * d.d0) / (8.0 * pi * pi);
    }
    return d;
}

ExpectedLK expected_lk_spin(double xi, double s, double u, Manifold manifold) {
    check_spin_params(xi, s);
    const double x2 = xi * xi, s2 = s * s, as = std::abs(s);
    const double vol = 8.0 * pi * pi;
    const double tail = 1.0 - gaussian_cdf(u), g = std::exp(-0.5 * u * u);
    const double scal_f = 2.0 / x2 - s2 / (2.0 * x2 * x2);
    ExpectedLK r;
    r.u = u;
    r.values[3] = vol * tail;
    r.values[2] = g * vol * E2_closed(xi, s) / std::sqrt(8.0 * pi);
    r.values[1] = u * g * vol * (2.0 * x2 + s2 - E1_closed(xi, s)) / std::sqrt(8.0 * pi * pi * pi) + tail * 3.0 * pi;
    r.values[0] = g / (4.0 * pi * pi) * vol * x2 * as * ((u * u - 1.0) + 0.5 * scal_f);
    if (manifold == Manifold::SU2) r.values = scaled(r.values, 2.0);
    return r;
}

ExpectedLK expected_lk_densities(double xi, double s, double u, bool text_d1) {
    const DConstants d = d_constants(xi, s);
    const std::array<double, 4> lk = lk_so3(LeftInvariantMetric::standard());
    const double g = std::exp(-0.5 * u * u);
    const std::array<double, 4> dens{1.0 - gaussian_cdf(u), g * d.d0, u * g * (text_d1 ? d.d1_text : d.d1),
                                     (u * u - 1.0) * g * d.d2 + g * d.d3};
    ExpectedLK r;
    r.u = u;
    for (int j = 0; j < 4; ++j) {
        double v = 0.0;
        for (int i = 0; i <= 3 - j; ++i) v += lk[i + j] * dens[i];
        r.values[j] = v;
    }
    return r;
}

ExpectedLK expected_lk_general(const FieldsFunction& fields, double u, double rel_tol, int max_order) {
    std::map<std::tuple<double, double, double>, std::pair<double, double>> cache;
    auto e_values = [&cache](const Eigentriple& a) {
        const auto key = std::make_tuple(a.a1, a.a2, a.a3);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const SphereQuadrature q = e_functions_quadrature(a);
        return cache[key] = {q.e1, q.e2};
    };
    const double tail = 1.0 - gaussian_cdf(u), g = std::exp(-0.5 * u * u);
    ExpectedLK r, prev;
    r.u = u;
    r.regime = Regime::Quadrature;
    r.converged = false;
    bool have_prev = false;
    for (int n = 8; n <= max_order; n *= 2) {
        const QuadratureRule q = gauss_legendre(n, 0.0, pi);
        const double dang = 2.0 * pi / n;
        double vol = 0.0, i2 = 0.0, i1 = 0.0, is = 0.0, i0 = 0.0;
        for (int a = 0; a < n; ++a) {
            const double phi = -pi + (a + 0.5) * dang;
            for (int b = 0; b < n; ++b) {
                const double theta = q.nodes[b];
                for (int c = 0; c < n; ++c) {
                    const double psi = -pi + (c + 0.5) * dang;
                    const PointFields pf = fields({phi, theta, psi});
                    validate(pf.a);
                    const double w = q.weights[b] * dang * dang * pf.vol_element;
                    const auto [e1, e2] = e_values(pf.a);
                    vol += w;
                    i2 += w * e2;
                    i1 += w * (pf.a.a1 + pf.a.a2 + pf.a.a3 - e1);
                    is += w * pf.scal_g;
                    i0 += w * ((u * u - 1.0) + 0.5 * pf.scal_f) * std::sqrt(pf.a.a1 * pf.a.a2 * pf.a.a3);
                }
            }
        }
        r.values[3] = vol * tail;
        r.values[2] = g * i2 / std::sqrt(8.0 * pi);
        r.values[1] = u * g * i1 / std::sqrt(8.0 * pi * pi * pi) + tail * is / (4.0 * pi);
        r.values[0] = g / (4.0 * pi * pi) * i0;
        if (have_prev) {
            double change = 0.0;
            for (int j = 0; j < 4; ++j) {
                change = std::max(change, std::abs(r.values[j] - prev.values[j]) / std::max(std::abs(r.values[j]), 1.0));
            }
            r.residual = change;
            if (change <= rel_tol) {
                r.converged = true;
                return r;
            }
        }
        prev = r;
        have_prev = true;
    }
    return r;
}

EuclideanLK expected_lk_euclidean(const Eigentriple& t, double u, double volume) {
    validate(t);
    if (!(volume >= 0.0)) throw DomainError("volume must be nonnegative");
    const SphereQuadrature q = e_functions_quadrature(t);
    const double g = std::exp(-0.5 * u * u);
    EuclideanLK out;
    out.lk.u = u;
    out.lk.regime = Regime::Quadrature;
    out.lk.residual = q.residual;
    out.lk.converged = q.converged;
    const double trace = t.a1 + t.a2 + t.a3;
    out.lk.values[3] = volume * (1.0 - gaussian_cdf(u));
    out.lk.values[2] = volume * g * q.e2 / std::sqrt(8.0 * pi);
    out.lk.values[1] = volume * u * g * (trace - q.e1) / std::sqrt(8.0 * pi * pi * pi);
    out.lk.values[0] = volume * g / (4.0 * pi * pi) * (u * u - 1.0) * std::sqrt(t.a1 * t.a2 * t.a3);
    out.gamma_sa = 8.0 / pi * q.e2 * q.e2;
    out.gamma_tmc = 0.5 * (trace - q.e1);
    out.gamma_tgc = std::cbrt(t.a1 * t.a2 * t.a3);
    return out;
}

ExpectedLK asymptotic_lk(double mu, double s, double u) {
    if (!(mu > 0.0)) throw DomainError("mu must be positive");
    if (s == 0.0) throw DomainError("s must be nonzero");
    const double as = std::abs(s), g = std::exp(-0.5 * u * u);
    ExpectedLK r;
    r.u = u;
    r.regime = Regime::Asymptotic;
    r.values[3] = std::pow(2.0, 1.5) * 8.0 * pi * pi * (1.0 - gaussian_cdf(u));
    r.values[2] = 2.0 * 2.0 * pi * pi * g * std::sqrt(5.0 / as) * std::sqrt(mu);
    r.values[1] = std::sqrt(2.0) * std::pow(2.0, 2.5) * 5.0 * std::sqrt(pi) * u * g * mu / as;
    r.values[0] = 10.0 * (u * u - 1.0) * g * mu;
    return r;
}

std::array<double, 4> to_2g(const std::array<double, 4>& lk) {
    std::array<double, 4> out{};
    for (int j = 0; j < 4; ++j) out[j] = std::pow(2.0, 0.5 * j) * lk[j];
    return out;
}

std::array<double, 4> from_2g(const std::array<double, 4>& lk) {
    std::array<double, 4> out{};
    for (int j = 0; j < 4; ++j) out[j] = std::pow(2.0, -0.5 * j) * lk[j];
    return out;
}

double unit_ball_volume(int d) { return std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0); }

std::array<double, 4> adler_taylor_lk(const std::array<double, 4>& lk_f, double u) {
    std::array<double, 4> rho{};
    rho[0] = 1.0 - gaussian_cdf(u);
    for (int j = 1; j <= 3; ++j) {
        rho[j] = std::pow(2.0 * pi, -0.5 * (j + 1)) * hermite_prob(j - 1, u) * std::exp(-0.5 * u * u);
    }
    auto binom = [](int n, int k) {
        double b = 1.0;
        for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
        return b;
    };
    std::array<double, 4> out{};
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; j <= 3 - i; ++j) {
            const double flag = binom(i + j, j) * unit_ball_volume(i + j) / (unit_ball_volume(i) * unit_ball_volume(j));
            out[i] += flag * lk_f[i + j] * rho[j];
        }
    }
    return out;
}

ExpectedLK expected_lk_homothetic(double xi, double u) {
    if (!(xi > 0.0)) throw DomainError("xi must be positive");
    const std::array<double, 4> ef = adler_taylor_lk(lk_so3({xi, xi}), u);
    ExpectedLK r;
    r.u = u;
    for (int j = 0; j < 4; ++j) r.values[j] = std::pow(xi, -j) * ef[j];
    return r;
}

WaveParams wave_params(int l) {
    if (l < 0) throw DomainError("degree must be nonnegative");
    const double v = l * (l + 1.0) / 3.0;
    return {v, v};
}

double berger_eigenvalue(int l, int s, double t) {
    if (l < 0) throw DomainError("degree must be nonnegative");
    if (!(t > 0.0)) throw DomainError("Berger parameter t must be positive");
    return -4.0 * (l * (l + 1.0) - (1.0 - 1.0 / (t * t)) * s * s);
}

} // namespace lkspin
