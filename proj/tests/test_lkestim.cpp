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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lkspin/errors.hpp"
#include "lkspin/estimators.hpp"
#include "lkspin/fixtures.hpp"

using namespace lkspin;

namespace {

constexpr double pi = std::numbers::pi;

// -f, to check additivity of the volume estimator.
class Negated : public ChartField {
public:
    explicit Negated(const ChartField& f) : f_(f) {}
    double value(const EulerPoint& p) const override { return -f_.value(p); }
    FieldJet jet(const EulerPoint& p) const override {
        FieldJet j = f_.jet(p);
        j.value = -j.value;
        j.gradient = -j.gradient;
        j.hessian = -j.hessian;
        return j;
    }

private:
    const ChartField& f_;
};

SpectrumSpec small_spectrum() {
    SpectrumSpec spec;
    spec.s = 2;
    for (int l = 2; l <= 5; ++l) spec.coeffs[l] = 1.0 / ((1.0 + l) * (1.0 + l));
    return normalize(spec);
}

// Q = V diag(3, 2, 1): four nondegenerate critical points with values 6, 0, -2, -4.
// With tilt 1.5 the level sets at u = 3 and u = -3 stay clear of the chart poles;
// with tilt 1.1 they cross theta = 0 and pi.
Mat3 trace_matrix(double tilt = 1.5) {
    const Mat3 v = to_rotation({0.3, tilt, -0.7});
    return v * Vec3(3.0, 2.0, 1.0).asDiagonal();
}

struct CosFixture {
    double l3, l2, l1_boundary, l1, chi_gb;
    int chi_morse;
};

CosFixture run_cos(int n, double theta0) {
    CosThetaField f;
    const EulerGrid grid = build_grid(f, Resolution::cube(n));
    const double u = std::cos(theta0);
    const auto si = SurfaceIntegrator(f, grid).integrate(u);
    CosFixture r;
    r.l3 = estimate_L3(grid, u);
    r.l2 = estimate_L2(si);
    const auto l1 = estimate_L1(si, r.l3);
    r.l1_boundary = l1.boundary_term;
    r.l1 = l1.value;
    r.chi_gb = estimate_L0_gaussbonnet(si).value;
    r.chi_morse = estimate_L0_morse(f, grid, u).value;
    return r;
}

} // namespace

TEST_CASE("cos theta fixture at 64^3 matches the closed-form tube") {
    for (double theta0 : {pi / 4, pi / 2, 3 * pi / 4}) {
        CAPTURE(theta0);
        const double u = std::cos(theta0);
        const CosFixture r = run_cos(64, theta0);
        CHECK(std::abs(r.l3 / (4 * pi * pi * (1 - u)) - 1) <= 1e-3);
        CHECK(std::abs(r.l2 / (2 * pi * pi * std::sin(theta0)) - 1) <= 1e-2);
        // H = -cos/(2 sin) on the torus of area 4 pi^2 sin
        const double boundary = 2 * pi * u;
        CHECK(std::abs(r.l1_boundary - boundary) <= 0.02 * std::max(std::abs(boundary), 2 * pi * 0.5));
        const double l1 = boundary + 3.0 / (8 * pi) * 4 * pi * pi * (1 - u);
        CHECK(std::abs(r.l1 - l1) <= 0.02 * std::abs(l1));
        CHECK(std::abs(r.chi_gb) <= 0.1);
        CHECK(r.chi_morse == 0);
    }
}

TEST_CASE("cos theta fixture at u = 0: scalar term alone is 3 pi / 2") {
    CosThetaField f;
    const EulerGrid grid = build_grid(f, Resolution::cube(64));
    const double l3 = estimate_L3(grid, 0.0);
    CHECK(3.0 / (8 * pi) * l3 == doctest::Approx(1.5 * pi).epsilon(1e-3));
}

TEST_CASE("mean outer curvature of the cos theta torus") {
    CosThetaField f;
    for (double th : {0.4, 1.0, 2.2}) {
        const double h = mean_out_curvature(f, {0.3, th, -1.0});
        CHECK(h == doctest::Approx(-std::cos(th) / (2 * std::sin(th))).epsilon(1e-12));
        // the torus {theta = th} is flat
        const FieldJet jet = f.jet({0.3, th, -1.0});
        CHECK(std::abs(level_gauss_curvature(jet, th, LeftInvariantMetric::standard(), 1e-12)) <= 1e-12);
    }
}

TEST_CASE("degenerate gradient raises") {
    CosThetaField f;
    FieldJet jet;
    CHECK_THROWS_AS(mean_out_curvature(jet, 1.0, LeftInvariantMetric::standard(), 1e-8), DegeneratePointError);
    CHECK_THROWS_AS(level_gauss_curvature(jet, 1.0, LeftInvariantMetric::standard(), 1e-8), DegeneratePointError);
}

TEST_CASE("limits: threshold below and above the field range") {
    CosThetaField f;
    const EulerGrid grid = build_grid(f, Resolution::cube(32));
    const auto below = extract_level_surface(grid, -2.0);
    CHECK(below.empty());
    CHECK(estimate_L2(below) == 0.0);
    CHECK(estimate_L3(grid, -2.0) == doctest::Approx(8 * pi * pi).epsilon(1e-3));
    const auto l1 = estimate_L1(integrate_surface(f, below), estimate_L3(grid, -2.0));
    CHECK(l1.value == doctest::Approx(3 * pi).epsilon(1e-3));
    CHECK(estimate_L0_gaussbonnet(f, below).value == 0.0);
    CHECK(estimate_L3(grid, 2.0) == 0.0);
    CHECK(extract_level_surface(grid, 2.0).empty());
}

TEST_CASE("mesh is closed, consistently oriented, normals point toward lower values") {
    CosThetaField cosf;
    const TraceField tr(trace_matrix());
    struct Case {
        const ChartField* f;
        double u;
    };
    for (const Case c : {Case{&cosf, 0.3}, Case{&tr, 3.0}, Case{&tr, -3.0}}) {
        const EulerGrid grid = build_grid(*c.f, Resolution::cube(32));
        const auto mesh = extract_level_surface(grid, c.u);
        REQUIRE(!mesh.empty());
        CHECK(boundary_edges(mesh).empty());
        CHECK(inconsistent_edges(mesh) == 0);
        const auto g = LeftInvariantMetric::standard();
        std::size_t bad = 0;
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto& tri = mesh.triangles[t];
            const Vec3 e1 = chart_delta(mesh.vertices[tri[0]], mesh.vertices[tri[1]]);
            const Vec3 e2 = chart_delta(mesh.vertices[tri[0]], mesh.vertices[tri[2]]);
            const EulerPoint cpt = triangle_centroid(mesh, t);
            bad += c.f->jet(cpt).gradient.dot(e1.cross(e2)) >= 0.0;
        }
        CHECK(bad == 0);
        for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
            const Vec3& n = mesh.normals[v];
            const double th = mesh.vertices[v].theta;
            CHECK(std::sqrt(n.dot(gram(g, th) * n)) == doctest::Approx(1.0).epsilon(1e-8));
            CHECK(c.f->jet(mesh.vertices[v]).gradient.dot(n) < 0.0);
        }
    }
}

TEST_CASE("mesh vertices interpolate the level") {
    const FieldRealization f(small_spectrum(), 11);
    double worst[2] = {0.0, 0.0};
    int slot = 0;
    for (int n : {32, 64}) {
        const EulerGrid grid = build_grid(f, Resolution::cube(n));
        const auto mesh = extract_level_surface(grid, 0.5);
        for (const auto& v : mesh.vertices) worst[slot] = std::max(worst[slot], std::abs(f.value(v) - 0.5));
        CHECK(inconsistent_edges(mesh) == 0);
        ++slot;
    }
    // linear interpolation error along an edge, O(|Hess| h^2)
    CHECK(worst[1] <= worst[0] / 3.0);
    CHECK(worst[1] <= 0.05);
}

TEST_CASE("L3 is monotone and additive under f -> -f") {
    const FieldRealization f(small_spectrum(), 5);
    const Negated nf(f);
    const EulerGrid grid = build_grid(f, Resolution::cube(24));
    const EulerGrid ngrid = build_grid(nf, Resolution::cube(24));
    double prev = estimate_L3(grid, -5.0);
    double total = 0.0;
    for (int j = 0; j < grid.n_theta(); ++j) total += grid.cell_volume(j) * grid.n_phi() * grid.n_psi();
    CHECK(total == doctest::Approx(8 * pi * pi).epsilon(5e-3));
    for (double u = -3.0; u <= 3.0; u += 0.25) {
        const double l3 = estimate_L3(grid, u);
        CHECK(l3 <= prev);
        prev = l3;
        CHECK(l3 + estimate_L3(ngrid, -u) == doctest::Approx(total).epsilon(1e-12));
    }
}

TEST_CASE("cos theta fixture converges with resolution") {
    const double theta0 = pi / 4, u = std::cos(theta0);
    const double l3 = 4 * pi * pi * (1 - u), l2 = 2 * pi * pi * std::sin(theta0);
    const double l1 = 2 * pi * u + 1.5 * pi * (1 - u);
    double prev3 = 0, prev2 = 0, prev1 = 0;
    int prev_n = 0;
    for (int n : {32, 64, 96}) {
        CAPTURE(n);
        const CosFixture r = run_cos(n, theta0);
        const double e3 = std::abs(r.l3 - l3), e2 = std::abs(r.l2 - l2), e1 = std::abs(r.l1 - l1);
        if (prev_n) {
            const double ratio = static_cast<double>(prev_n) / n;
            CHECK(e3 <= prev3 * ratio);
            CHECK(e2 <= prev2 * ratio);
            CHECK(e1 <= prev1 * ratio);
        }
        prev3 = e3;
        prev2 = e2;
        prev1 = e1;
        prev_n = n;
    }
}

TEST_CASE("trace fixture: ball around the maximum and Morse sums") {
    const TraceField f(trace_matrix());
    const EulerGrid grid = build_grid(f, Resolution::cube(32));
    const CriticalSet crit = find_critical_points(f, grid);
    REQUIRE(crit.points.size() == 4);
    CHECK(crit.reliable());
    std::vector<double> values;
    for (const auto& cp : crit.points) values.push_back(cp.value);
    std::sort(values.begin(), values.end());
    CHECK(values[0] == doctest::Approx(-4.0).epsilon(1e-10));
    CHECK(values[1] == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(values[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(values[3] == doctest::Approx(6.0).epsilon(1e-10));
    for (const auto& cp : crit.points) {
        // index grows with the critical value for this perfect Morse function
        const int rank = static_cast<int>(std::find(values.begin(), values.end(), cp.value) - values.begin());
        CHECK(cp.index == rank);
    }
    CHECK(morse_count(crit, -10.0) == 0);
    CHECK(morse_count(crit, 10.0) == 0);
    CHECK(morse_count(crit, 3.0) == 1);
    CHECK(morse_count(crit, -1.0) == 0);
    CHECK(morse_count(crit, -3.0) == 1);

    const EulerGrid fine = build_grid(f, Resolution::cube(48));
    const SurfaceIntegrator surfaces(f, fine);
    for (double u : {3.0, -3.0}) {
        CAPTURE(u);
        CHECK(estimate_L0_gaussbonnet(surfaces.integrate(u)).value == doctest::Approx(1.0).epsilon(0.1));
    }
    // torus around the index 1 and 2 points
    CHECK(std::abs(estimate_L0_gaussbonnet(surfaces.integrate(-1.0)).value) <= 0.1);
}

TEST_CASE("left translation: x -> f(p x) for every field type") {
    const EulerPoint p{0.4, 1.2, -2.1};
    const Mat3 rp = to_rotation(p);
    const CosThetaField cosf;
    const TraceField tr(trace_matrix());
    const FieldRealization fr(small_spectrum(), 3);
    for (const ChartField* f : {static_cast<const ChartField*>(&cosf), static_cast<const ChartField*>(&tr),
                                static_cast<const ChartField*>(&fr)}) {
        const auto moved = f->left_translate(p);
        REQUIRE(moved);
        for (const EulerPoint x : {EulerPoint{0.1, 0.7, 2.0}, EulerPoint{-2.5, 2.9, -0.3}, EulerPoint{1.7, 1.5, 0.9}}) {
            const double expect = f->value(from_rotation(rp * to_rotation(x)));
            CHECK(moved->value(x) == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
        }
    }
    CHECK(Negated(cosf).left_translate(p) == nullptr);
}

TEST_CASE("chart weights form a partition of unity") {
    for (double th = 0.0; th <= pi; th += pi / 90) {
        const double w = primary_chart_weight(th);
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
        CHECK(w == doctest::Approx(primary_chart_weight(pi - th)).epsilon(1e-14));
        if (std::min(th, pi - th) <= pi / 6) CHECK(w == 0.0);
        if (std::min(th, pi - th) >= pi / 4) CHECK(w == 1.0);
    }
    // the second chart carries the first chart's polar caps on its equator
    const Mat3 p = to_rotation(kSecondChart);
    for (const EulerPoint x : {EulerPoint{0.3, 0.05, 1.0}, EulerPoint{-1.0, pi - 0.1, 2.0}}) {
        const EulerPoint y = from_rotation(p.transpose() * to_rotation(x));
        CHECK(std::abs(y.theta - pi / 2) <= 0.11);
    }
}

TEST_CASE("level sets through the chart poles: both charts recover the Euler characteristic") {
    // tilt 1.1: the sets at u = 3 and -3 reach theta = 0 and pi, where the
    // primary mesh has boundary
    const TraceField f(trace_matrix(1.1));
    const EulerGrid grid = build_grid(f, Resolution::cube(48));
    const SurfaceIntegrator surfaces(f, grid);
    REQUIRE(surfaces.two_charts());
    for (double u : {3.0, -3.0}) {
        CAPTURE(u);
        CHECK_FALSE(boundary_edges(extract_level_surface(grid, u)).empty());
        CHECK(estimate_L0_gaussbonnet(surfaces.integrate(u)).value == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("crossing estimator converges on a random field") {
    const FieldRealization f(small_spectrum(), 1);
    for (double u : {0.0, 1.0, 2.0}) {
        CAPTURE(u);
        const double coarse = estimate_L2_crossings(f, u, 128, 128), fine = estimate_L2_crossings(f, u, 256, 256);
        CHECK(std::abs(coarse / fine - 1) <= 2e-3);
    }
    CHECK(estimate_L2_crossings(f, 50.0, 64, 64) == 0.0);
    CHECK_THROWS_AS(estimate_L2_crossings(f, 0.0, 0, 64), ConfigError);
}

TEST_CASE("L2 crossing estimator agrees with the mesh on random fields") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const FieldRealization f(small_spectrum(), seed);
        const EulerGrid grid = build_grid(f, Resolution::cube(64));
        const SurfaceIntegrator surfaces(f, grid);
        for (double u : {-1.0, 0.0, 1.0}) {
            CAPTURE(seed);
            CAPTURE(u);
            const double mesh = estimate_L2(surfaces.integrate(u));
            const double cross = estimate_L2_crossings(f, u, 256, 256);
            CHECK(std::abs(mesh / cross - 1) <= 0.02);
        }
    }
}

TEST_CASE("Morse and Gauss-Bonnet agree away from critical values") {
    // a critical value within a fraction of a cell's field variation of u
    // produces a component or handle the grid cannot resolve
    constexpr double kGap = 0.03;
    int resolved = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const FieldRealization f(small_spectrum(), seed);
        const EulerGrid grid = build_grid(f, Resolution::cube(64));
        const CriticalSet crit = find_critical_points(f, grid);
        const auto reports = estimate_all(f, grid, {0.0, 1.0, 2.0});
        for (const auto& r : reports) {
            double gap = std::numeric_limits<double>::infinity();
            for (const auto& cp : crit.points) gap = std::min(gap, std::abs(cp.value - r.u));
            if (gap < kGap) continue;
            CAPTURE(seed);
            CAPTURE(r.u);
            REQUIRE(r.L0_morse);
            CHECK(std::abs(r.L0_gb - *r.L0_morse) < 0.5);
            ++resolved;
        }
    }
    CHECK(resolved >= 12);
}

TEST_CASE("estimator report JSON and OFF export") {
    CosThetaField f;
    const EulerGrid grid = build_grid(f, Resolution::cube(16));
    const auto reports = estimate_all(f, grid, {0.0});
    const auto j = to_json(reports.at(0));
    for (const char* key : {"u", "L0_gb", "L0_morse", "L1", "L2", "L3", "skipped_area_fraction"}) CHECK(j.contains(key));
    CHECK(j["L0_morse"] == 0);
    const auto mesh = extract_level_surface(grid, 0.0);
    std::ostringstream off;
    write_off(mesh, off);
    std::istringstream in(off.str());
    std::string magic;
    std::size_t nv = 0, nf = 0, ne = 0;
    in >> magic >> nv >> nf >> ne;
    CHECK(magic == "OFF");
    CHECK(nv == mesh.vertices.size());
    CHECK(nf == mesh.triangles.size());
    CHECK_THROWS_AS(estimate_all(f, grid, {0.0}, {L0Method::GaussBonnet, L2Method::Crossings}), ConfigError);
    CHECK_THROWS_AS(build_grid(f, Resolution::cube(7)), ConfigError);
}
