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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lkspin/errors.hpp"
#include "lkspin/quadrature.hpp"
#include "lkspin/so3geom.hpp"

using namespace lkspin;

namespace {

constexpr double pi = std::numbers::pi;

// Only theta enters the chart tensors, so d_phi = d_psi = 0.
Mat3 dgram(const LeftInvariantMetric& g, double th, double h = 1e-6) {
    return (gram(g, th + h) - gram(g, th - h)) / (2 * h);
}

Christoffel christoffel_fd(const LeftInvariantMetric& g, double th) {
    const Mat3 gi = gram_inverse(g, th);
    const Mat3 dg = dgram(g, th);
    auto d = [&](int a, int i, int j) { return a == 1 ? dg(i, j) : 0.0; };
    Christoffel out;
    for (int k = 0; k < 3; ++k) {
        out.upper[k].setZero();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int l = 0; l < 3; ++l)
                    out.upper[k](i, j) += 0.5 * gi(k, l) * (d(i, j, l) + d(j, i, l) - d(l, i, j));
    }
    return out;
}

Riemann13 riemann_fd(const LeftInvariantMetric& g, double th) {
    const double h = 1e-6;
    const Christoffel c = christoffel(g, th);
    const Christoffel cp = christoffel(g, th + h), cm = christoffel(g, th - h);
    auto dG = [&](int a, int m, int j, int k) { return a == 1 ? (cp(m, j, k) - cm(m, j, k)) / (2 * h) : 0.0; };
    Riemann13 r;
    for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    double v = dG(i, m, j, k) - dG(j, m, i, k);
                    for (int q = 0; q < 3; ++q) v += c(m, i, q) * c(q, j, k) - c(m, j, q) * c(q, i, k);
                    r.at(m, i, j, k) = v;
                }
    return r;
}

const LeftInvariantMetric kMetrics[] = {{1.0, 1.0}, {1.7, 1.3}, {0.6, -2.0}, {10.0, 2.0}};
const double kThetas[] = {0.2, 0.7, 1.5, 2.4, 3.0};

} // namespace

TEST_CASE("gram matrix and inverse") {
    const Mat3 g = gram({1.0, 1.0}, 0.3);
    CHECK(g(0, 0) == doctest::Approx(1.0));
    CHECK(g(1, 1) == doctest::Approx(1.0));
    CHECK(g(2, 2) == doctest::Approx(1.0));
    CHECK(g(0, 2) == doctest::Approx(std::cos(0.3)));
    for (const auto& m : kMetrics)
        for (double th : kThetas) {
            CHECK((gram(m, th) * gram_inverse(m, th) - Mat3::Identity()).norm() < 1e-10);
            const double det = std::pow(m.xi, 4) * m.s * m.s * std::pow(std::sin(th), 2);
            CHECK(gram(m, th).determinant() == doctest::Approx(det).epsilon(1e-10));
            CHECK(volume_element(m, th) == doctest::Approx(std::sqrt(det)).epsilon(1e-12));
        }
}

TEST_CASE("chart boundary and bad parameters") {
    CHECK_THROWS_AS(gram({1.0, 1.0}, 0.0), SingularChartError);
    CHECK_THROWS_AS(christoffel({1.0, 1.0}, pi), SingularChartError);
    CHECK_THROWS_AS(gram({0.0, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(gram({1.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(scalar_curvature({-1.0, 1.0}), DomainError);
}

TEST_CASE("Christoffel symbols match the metric-derivative oracle") {
    for (const auto& m : kMetrics)
        for (double th : kThetas) {
            const Christoffel a = christoffel(m, th), b = christoffel_fd(m, th);
            for (int k = 0; k < 3; ++k) {
                CHECK((a.upper[k] - b.upper[k]).norm() < 1e-7);
                CHECK((a.upper[k] - a.upper[k].transpose()).norm() == 0.0);
            }
        }
    const Christoffel c = christoffel({1.0, 1.0}, 0.9);
    CHECK(c(0, 0, 1) == doctest::Approx(0.5 / std::tan(0.9)));
    CHECK(c(1, 0, 0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("Riemann (1,3) matches differentiated Christoffel symbols") {
    for (const auto& m : kMetrics)
        for (double th : kThetas) {
            const Riemann13 a = riemann13(m, th), b = riemann_fd(m, th);
            double err = 0.0;
            for (int i = 0; i < 81; ++i) err = std::max(err, std::abs(a.data[i] - b.data[i]));
            CHECK(err < 1e-6 * std::max(1.0, std::pow(m.s / m.xi, 4)));
        }
}

TEST_CASE("lowering the (1,3) tensor gives the pair matrix") {
    for (const auto& m : kMetrics)
        for (double th : kThetas) {
            const Riemann13 r = riemann13(m, th);
            const Mat3 g = gram(m, th), pairs = riemann04(m, th);
            double err = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l) {
                            double low = 0.0;
                            for (int q = 0; q < 3; ++q) low += r(q, i, j, k) * g(l, q);
                            err = std::max(err, std::abs(low - riemann04_component(pairs, i, j, k, l)));
                        }
            CHECK(err < 1e-10 * std::max(1.0, std::pow(m.s, 4)));
        }
}

TEST_CASE("pair matrix entries and symmetries") {
    const LeftInvariantMetric m{1.7, 1.3};
    const double th = 0.7;
    const Mat3 p = riemann04(m, th);
    const double w = std::pow(m.s, 4) / (4 * m.xi * m.xi);
    CHECK(p(1, 1) == doctest::Approx(-std::pow(std::sin(th), 2) * w));
    CHECK(p(2, 2) == doctest::Approx(-w));
    CHECK(p(0, 2) == doctest::Approx(std::cos(th) * w));
    CHECK((p - p.transpose()).norm() == 0.0);
    // first Bianchi identity R_{ijkl} + R_{jkil} + R_{kijl} = 0
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    const double b = riemann04_component(p, i, j, k, l) + riemann04_component(p, j, k, i, l) +
                                     riemann04_component(p, k, i, j, l);
                    CHECK(std::abs(b) < 1e-12);
                }
}

TEST_CASE("scalar curvature") {
    CHECK(scalar_curvature({1.0, 1.0}) == doctest::Approx(1.5));
    for (const auto& m : kMetrics)
        for (double th : kThetas) {
            const Mat3 gi = gram_inverse(m, th), p = riemann04(m, th);
            double sc = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l) sc += gi(i, l) * gi(j, k) * riemann04_component(p, i, j, k, l);
            CHECK(sc == doctest::Approx(scalar_curvature(m)).epsilon(1e-9));
        }
}

TEST_CASE("sectional curvatures") {
    for (double th : kThetas) {
        for (auto pl : {CoordinatePlane::PhiTheta, CoordinatePlane::PhiPsi, CoordinatePlane::ThetaPsi})
            CHECK(sectional_curvature({1.0, 1.0}, th, pl) == doctest::Approx(0.25).epsilon(1e-12));
    }
    const LeftInvariantMetric m{1.7, 1.3};
    const double x2 = m.xi * m.xi, s2 = m.s * m.s;
    for (double th : kThetas) {
        const double sn = std::sin(th), c = std::cos(th);
        const double sec12 = (sn * sn * (x2 - 0.75 * s2) + c * c * s2 * s2 / (4 * x2)) / (sn * sn * x2 * x2 + c * c * s2 * x2);
        CHECK(sectional_curvature(m, th, CoordinatePlane::PhiTheta) == doctest::Approx(sec12).epsilon(1e-12));
        CHECK(sectional_curvature(m, th, CoordinatePlane::PhiPsi) == doctest::Approx(s2 / (4 * x2 * x2)).epsilon(1e-12));
        CHECK(sectional_curvature(m, th, CoordinatePlane::ThetaPsi) == doctest::Approx(s2 / (4 * x2 * x2)).epsilon(1e-12));
    }
    // g-orthonormal frame of the spin metric: the plane orthogonal to the spin axis has
    // curvature (xi^2 - 3 s^2/4)/xi^4 and planes containing the axis s^2/(4 xi^4).
    const double th = 1.1;
    const Vec3 axis(0, 0, 1);
    const Vec3 e1(0, 1, 0);
    const Vec3 e2(1.0, 0.0, -std::cos(th));
    CHECK(sectional_curvature(m, th, e1, e2) == doctest::Approx((x2 - 0.75 * s2) / (x2 * x2)).epsilon(1e-12));
    CHECK(sectional_curvature(m, th, axis, e2) == doctest::Approx(s2 / (4 * x2 * x2)).epsilon(1e-12));
    CHECK_THROWS_AS(sectional_curvature(m, th, e1, 2.0 * e1), DomainError);
}

TEST_CASE("Lipschitz-Killing curvatures of SO(3)") {
    const auto lk = lk_so3({1.0, 1.0});
    CHECK(lk[0] == 0.0);
    CHECK(lk[1] == doctest::Approx(3 * pi));
    CHECK(lk[2] == 0.0);
    CHECK(lk[3] == doctest::Approx(8 * pi * pi));
    for (const auto& m : kMetrics) {
        // volume from integrating the volume element
        const QuadratureRule q = gauss_legendre(40, 0.0, pi);
        double vol = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) vol += q.weights[i] * volume_element(m, q.nodes[i]);
        vol *= 4 * pi * pi;
        CHECK(lk_so3(m)[3] == doctest::Approx(vol).epsilon(1e-12));
        CHECK(lk_so3(m)[1] == doctest::Approx(scalar_curvature(m) * vol / (4 * pi)).epsilon(1e-12));
        const LeftInvariantMetric flipped{m.xi, -m.s};
        for (int j = 0; j < 4; ++j) CHECK(lk_so3(flipped)[j] == lk_so3(m)[j]);
    }
}
