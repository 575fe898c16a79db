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

#include "lkspin/so3geom.hpp"

#include <cmath>
#include <numbers>

#include "lkspin/errors.hpp"

namespace lkspin {

namespace {

void check_chart(double theta) {
    if (!(std::abs(std::sin(theta)) > 1e-12) || theta < 0.0 || theta > std::numbers::pi) {
        throw SingularChartError("theta outside the open chart (0, pi)");
    }
}

constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

// Pair slot of (i, j) and the sign of the permutation; slot -1 when i == j.
std::pair<int, double> pair_slot(int i, int j) {
    if (i == j) return {-1, 0.0};
    for (int p = 0; p < 3; ++p) {
        if (kPairs[p][0] == i && kPairs[p][1] == j) return {p, 1.0};
        if (kPairs[p][0] == j && kPairs[p][1] == i) return {p, -1.0};
    }
    return {-1, 0.0};
}

} // namespace

void validate(const LeftInvariantMetric& g) {
    if (!(g.xi > 0.0) || !std::isfinite(g.xi)) throw DomainError("metric requires xi > 0");
    if (g.s == 0.0 || !std::isfinite(g.s)) throw DomainError("metric requires s != 0");
}

Mat3 gram(const LeftInvariantMetric& g, double theta) {
    validate(g);
    check_chart(theta);
    const double x2 = g.xi * g.xi, s2 = g.s * g.s;
    const double c = std::cos(theta), sn = std::sin(theta);
    Mat3 m;
    m << x2 * sn * sn + s2 * c * c, 0.0, s2 * c,
         0.0, x2, 0.0,
         s2 * c, 0.0, s2;
    return m;
}

Mat3 gram_inverse(const LeftInvariantMetric& g, double theta) {
    validate(g);
    check_chart(theta);
    const double x2 = g.xi * g.xi, s2 = g.s * g.s;
    const double c = std::cos(theta), sn = std::sin(theta);
    const double q = 1.0 / (x2 * sn * sn);
    Mat3 m;
    m << q, 0.0, -c * q,
         0.0, 1.0 / x2, 0.0,
         -c * q, 0.0, 1.0 / s2 + c * c * q;
    return m;
}

double volume_element(const LeftInvariantMetric& g, double theta) {
    validate(g);
    return g.xi * g.xi * std::abs(g.s) * std::sin(theta);
}

Christoffel christoffel(const LeftInvariantMetric& g, double theta) {
    validate(g);
    check_chart(theta);
    const double x2 = g.xi * g.xi, s2 = g.s * g.s;
    const double c = std::cos(theta), sn = std::sin(theta);
    const double h = s2 / (2.0 * x2); // s^2 / (2 xi^2)
    Christoffel gm;
    for (auto& m : gm.upper) m.setZero();
    // phi component
    gm.upper[0](0, 1) = gm.upper[0](1, 0) = (c / sn) * (1.0 - h);
    gm.upper[0](1, 2) = gm.upper[0](2, 1) = -h / sn;
    // theta component
    gm.upper[1](0, 0) = -sn * c * (1.0 - 2.0 * h);
    gm.upper[1](0, 2) = gm.upper[1](2, 0) = h * sn;
    // psi component
    gm.upper[2](0, 1) = gm.upper[2](1, 0) = -(1.0 - h) * c * c / sn - 0.5 * sn;
    gm.upper[2](1, 2) = gm.upper[2](2, 1) = h * c / sn;
    return gm;
}

Riemann13 riemann13(const LeftInvariantMetric& g, double theta) {
    validate(g);
    check_chart(theta);
    const double x2 = g.xi * g.xi, s2 = g.s * g.s;
    const double c = std::cos(theta), sn = std::sin(theta);
    const double h = s2 / (2.0 * x2);
    const double h2 = h * h;
    const double q = s2 / (4.0 * x2);
    Riemann13 r;
    auto set = [&r](int m, int i, int j, int k, double v) {
        r.at(m, i, j, k) = v;
        r.at(m, j, i, k) = -v;
    };
    set(0, 0, 1, 1, 1.0 - 3.0 * q);
    set(0, 0, 2, 0, c * h2);
    set(0, 0, 2, 2, h2);
    set(1, 0, 1, 0, -sn * sn * (1.0 - 3.0 * q) - c * c * h2);
    set(1, 0, 1, 2, -c * h2);
    set(1, 1, 2, 0, c * h2);
    set(1, 1, 2, 2, h2);
    set(2, 0, 1, 1, (s2 - x2) * c / x2);
    set(2, 0, 2, 0, -sn * sn * q - c * c * h2);
    set(2, 0, 2, 2, -c * h2);
    set(2, 1, 2, 1, -q);
    return r;
}

Mat3 riemann04(const LeftInvariantMetric& g, double theta) {
    validate(g);
    check_chart(theta);
    const double x2 = g.xi * g.xi, s2 = g.s * g.s;
    const double c = std::cos(theta), sn = std::sin(theta);
    const double w = s2 * s2 / (4.0 * x2);
    Mat3 m;
    m << -sn * sn * (x2 - 0.75 * s2) - c * c * w, 0.0, c * w,
         0.0, -sn * sn * w, 0.0,
         c * w, 0.0, -w;
    return m;
}

double riemann04_component(const Mat3& pairs, int i, int j, int k, int l) {
    const auto [a, sa] = pair_slot(i, j);
    const auto [b, sb] = pair_slot(k, l);
    if (a < 0 || b < 0) return 0.0;
    return sa * sb * pairs(a, b);
}

double scalar_curvature(const LeftInvariantMetric& g) {
    validate(g);
    const double x2 = g.xi * g.xi, s2 = g.s * g.s;
    return 2.0 / x2 - s2 / (2.0 * x2 * x2);
}

double sectional_curvature(const LeftInvariantMetric& g, double theta, CoordinatePlane plane) {
    const int p = static_cast<int>(plane);
    Vec3 u = Vec3::Zero(), v = Vec3::Zero();
    u(kPairs[p][0]) = 1.0;
    v(kPairs[p][1]) = 1.0;
    return sectional_curvature(g, theta, u, v);
}

double sectional_curvature(const LeftInvariantMetric& g, double theta, const Vec3& u, const Vec3& v) {
    const Mat3 gm = gram(g, theta);
    const double area2 = u.dot(gm * u) * v.dot(gm * v) - std::pow(u.dot(gm * v), 2);
    if (!(area2 > 0.0)) throw DomainError("sectional curvature needs two independent vectors");
    Vec3 b;
    for (int p = 0; p < 3; ++p) {
        const int i = kPairs[p][0], j = kPairs[p][1];
        b(p) = u(i) * v(j) - u(j) * v(i);
    }
    return -b.dot(riemann04(g, theta) * b) / area2;
}

std::array<double, 4> lk_so3(const LeftInvariantMetric& g) {
    validate(g);
    constexpr double pi = std::numbers::pi;
    const double as = std::abs(g.s), x2 = g.xi * g.xi;
    return {0.0, 4.0 * as * pi * (1.0 - g.s * g.s / (4.0 * x2)), 0.0, 8.0 * pi * pi * x2 * as};
}

} // namespace lkspin
