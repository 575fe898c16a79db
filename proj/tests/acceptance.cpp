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

// One PASS/FAIL line per acceptance criterion; detail lines are indented.
// Usage: acceptance [results-dir]. Monte Carlo results are written there
// before they are compared.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lkspin/critical.hpp"
#include "lkspin/estimators.hpp"
#include "lkspin/expectations.hpp"
#include "lkspin/fixtures.hpp"
#include "lkspin/format.hpp"
#include "lkspin/mc.hpp"
#include "lkspin/parallel.hpp"
#include "lkspin/rng.hpp"
#include "lkspin/so3geom.hpp"

using namespace lkspin;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string summary;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

void detail(const std::string& line) { std::cout << "  " << line << '\n'; }

std::filesystem::path g_results;

void persist(const std::string& name, const nlohmann::json& j) {
    if (g_results.empty()) return;
    std::ofstream(g_results / name) << j.dump(2) << '\n';
}

// Chart tensors depend on theta only, so every phi and psi derivative vanishes.
Christoffel christoffel_fd(const LeftInvariantMetric& g, double th) {
    const double h = 1e-6;
    const Mat3 dg = (gram(g, th + h) - gram(g, th - h)) / (2 * h);
    const Mat3 gi = gram_inverse(g, th);
    auto d = [&](int a, int i, int j) { return a == 1 ? dg(i, j) : 0.0; };
    Christoffel out;
    for (int k = 0; k < 3; ++k) {
        out.upper[k].setZero();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int l = 0; l < 3; ++l) out.upper[k](i, j) += 0.5 * gi(k, l) * (d(i, j, l) + d(j, i, l) - d(l, i, j));
    }
    return out;
}

Riemann13 riemann_fd(const LeftInvariantMetric& g, double th) {
    const double h = 1e-6;
    const Christoffel c = christoffel(g, th), cp = christoffel(g, th + h), cm = christoffel(g, th - h);
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

Outcome criterion1() {
    const double scal11 = scalar_curvature({1.0, 1.0});
    double contraction = 0.0, chris = 0.0, riem = 0.0;
    for (double xi : {1.0, 2.0, 3.0}) {
        for (double s : {1.0, 2.0}) {
            const LeftInvariantMetric g{xi, s};
            for (int n = 0; n < 20; ++n) {
                const double th = (n + 0.5) * pi / 20;
                const Mat3 gi = gram_inverse(g, th), p = riemann04(g, th);
                double sc = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        for (int k = 0; k < 3; ++k)
                            for (int l = 0; l < 3; ++l) sc += gi(i, l) * gi(j, k) * riemann04_component(p, i, j, k, l);
                contraction = std::max(contraction, std::abs(sc - scalar_curvature(g)));
                const Christoffel a = christoffel(g, th), b = christoffel_fd(g, th);
                for (int k = 0; k < 3; ++k) chris = std::max(chris, (a.upper[k] - b.upper[k]).cwiseAbs().maxCoeff());
                const Riemann13 ra = riemann13(g, th), rb = riemann_fd(g, th);
                for (int q = 0; q < 81; ++q) riem = std::max(riem, std::abs(ra.data[q] - rb.data[q]));
            }
        }
    }
    detail("scal(1,1) - 1.5 = " + fmt(scal11 - 1.5) + "; contraction residual " + fmt(contraction) +
           "; Christoffel FD " + fmt(chris) + "; Riemann FD " + fmt(riem));
    const bool pass = std::abs(scal11 - 1.5) <= 1e-12 && contraction <= 1e-10 && chris <= 1e-6 && riem <= 1e-6;
    return {pass, "geometry exactness"};
}

Outcome criterion2() {
    bool pass = true;
    double worst_quad = 0.0, worst_z = 0.0;
    for (double ratio : {0.25, 0.5, 0.9, 1.1, 2.0, 5.0}) {
        const double s = 1.0, xi = ratio;
        const Eigentriple t{xi * xi, xi * xi, s * s};
        const SphereQuadrature q = e_functions_quadrature(t);
        const double e1 = E1_closed(xi, s), e2 = E2_closed(xi, s);
        const double rel = std::max(std::abs(e1 - q.e1) / std::abs(q.e1), std::abs(e2 - q.e2) / std::abs(q.e2));
        const EMonteCarlo mc = e_functions_monte_carlo(t, 10000000, 20260 + static_cast<std::uint64_t>(ratio * 100));
        const double z = std::max(std::abs(mc.e1 - e1) / mc.e1_stderr, std::abs(mc.e2 - e2) / mc.e2_stderr);
        detail("xi/|s| = " + fmt(ratio) + ": E1 " + format_double(e1) + ", E2 " + format_double(e2) +
               "; quadrature rel " + fmt(rel) + "; Monte Carlo max |z| " + fmt(z));
        worst_quad = std::max(worst_quad, rel);
        worst_z = std::max(worst_z, z);
        pass = pass && q.converged && rel <= 1e-8 && z <= 4.0;
    }
    return {pass, "special functions (quadrature rel " + fmt(worst_quad) + ", Monte Carlo max |z| " + fmt(worst_z) + ")"};
}

Outcome criterion3() {
    double d_err = 0.0, route_err = 0.0;
    for (double xi : {0.5, 0.8, 1.5, 2.0, 3.0, 5.0, 10.0}) {
        for (double s : {1.0, 2.0, -3.0}) {
            if (std::abs(xi - std::abs(s)) < 1e-9) continue;
            const DConstants d = d_constants(xi, s);
            const double as = std::abs(s);
            d_err = std::max(d_err, std::abs(d.d0 - E2_closed(xi, s) / std::sqrt(8 * pi)) / std::abs(d.d0));
            d_err = std::max(d_err, std::abs(8 * pi * pi * d.d2 - 2 * xi * xi * as) / (2 * xi * xi * as));
            const double rhs = 2 * as * (1 - s * s / (4 * xi * xi));
            d_err = std::max(d_err, std::abs(3 * pi * d.d0 + 8 * pi * pi * d.d3 - rhs) / std::max(1.0, std::abs(rhs)));
            for (double u : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
                const ExpectedLK a = expected_lk_densities(xi, s, u), b = expected_lk_spin(xi, s, u);
                for (int j : {0, 2, 3}) {
                    route_err = std::max(route_err, std::abs(a.values[j] - b.values[j]) / std::max(1.0, std::abs(b.values[j])));
                }
            }
        }
    }
    detail("d identities max rel residual " + fmt(d_err) + "; density vs integral route max rel " + fmt(route_err));
    return {d_err <= 1e-12 && route_err <= 1e-10, "closed-form consistency"};
}

Outcome criterion4() {
    CosThetaField f;
    const EulerGrid grid = build_grid(f, Resolution::cube(64));
    const SurfaceIntegrator surfaces(f, grid);
    bool pass = true;
    for (double theta0 : {pi / 4, pi / 2, 3 * pi / 4}) {
        const double u = std::cos(theta0);
        const SurfaceIntegrals si = surfaces.integrate(u);
        const double l3 = estimate_L3(grid, u), l2 = estimate_L2(si);
        const double l1 = estimate_L1(si, l3).value;
        const double chi_gb = estimate_L0_gaussbonnet(si).value;
        const int chi_morse = estimate_L0_morse(f, grid, u).value;
        const double e3 = std::abs(l3 / (4 * pi * pi * (1 - u)) - 1);
        const double e2 = std::abs(l2 / (2 * pi * pi * std::sin(theta0)) - 1);
        // H = -cos/(2 sin) on a flat torus of area 4 pi^2 sin(theta0)
        const double l1_exact = 2 * pi * u + 3.0 / (8 * pi) * 4 * pi * pi * (1 - u);
        const double e1 = std::abs(l1 / l1_exact - 1);
        detail("theta0 = " + fmt(theta0) + ": L3 rel " + fmt(e3) + ", L2 rel " + fmt(e2) + ", L1 rel " + fmt(e1) +
               ", chi GB " + fmt(chi_gb) + ", chi Morse " + std::to_string(chi_morse));
        pass = pass && e3 <= 1e-3 && e2 <= 1e-2 && e1 <= 0.02 && std::abs(chi_gb) <= 0.1 && std::abs(chi_morse) <= 0.1;
    }
    return {pass, "LK machinery fixture"};
}

Outcome criterion5(int threads) {
    ExperimentConfig cfg;
    cfg.spec = reference_spectrum();
    cfg.resolution = Resolution::cube(64);
    cfg.thresholds = {-1.0, 0.0, 1.0};
    cfg.trials = 100;
    cfg.master_seed = 2026;
    cfg.threads = threads;
    const ExperimentResult r = run_experiment(cfg);
    persist("mc_reproduction.json", to_json(r));
    persist("mc_reproduction_manifest.json", manifest(r, true));
    const char* names[] = {"L0", "L1", "L2", "L3"};
    for (const auto& t : r.thresholds) {
        for (int k = 0; k < 4; ++k) {
            const LKStatistic& s = t.lk[k];
            const bool ok = within_tolerance(s, kMonteCarloTolerances[k]);
            detail("u = " + fmt(t.u) + " " + names[k] + ": mean " + format_double(s.mean) + " se " + fmt(s.se) +
                   " theory " + format_double(s.theory) + " z " + fmt(s.z) + (ok ? "" : "  [breach]"));
        }
        if (t.l0_alternate) {
            detail("u = " + fmt(t.u) + " L0 Gauss-Bonnet: mean " + fmt(t.l0_alternate->mean) + " z " + fmt(t.l0_alternate->z));
        }
        detail("u = " + fmt(t.u) + " excluded " + std::to_string(t.excluded) + " of " + std::to_string(t.used + t.excluded));
    }
    const auto breaches = check_tolerances(r);
    detail("wall time " + fmt(r.wall_seconds) + " s on " + std::to_string(threads) + " threads");
    return {breaches.empty() && !r.excessive_exclusion(),
            "Monte Carlo reproduction (" + std::to_string(breaches.size()) + " of 12 entries outside tolerance)"};
}

Outcome criterion6() {
    const double xi = 50.0, s = 2.0, mu = xi * xi * s / 5;
    bool pass = true;
    for (double u : {0.0, 1.0}) {
        const auto exact = to_2g(expected_lk_spin(xi, s, u).values);
        const auto asym = asymptotic_lk(mu, s, u).values;
        for (int j : {0, 2}) {
            const double rel = std::abs(exact[j] - asym[j]) / std::abs(asym[j]);
            detail("u = " + fmt(u) + " EL" + std::to_string(j) + " (2g): exact " + format_double(exact[j]) +
                   ", leading term " + format_double(asym[j]) + ", residual " + format_double(exact[j] - asym[j]) +
                   ", rel " + fmt(rel));
            pass = pass && rel <= 0.02;
        }
    }
    return {pass, "asymptotic regime"};
}

Outcome criterion7() {
    bool pass = true;
    for (double xi : {0.5, 1.0, 2.0, 10.0}) {
        for (double s : {1.0, -2.0, 3.0}) {
            for (double u : {-1.5, 0.0, 0.7, 2.0}) {
                const auto a = expected_lk_spin(xi, s, u, Manifold::SU2), b = expected_lk_spin(xi, s, u);
                for (int j = 0; j < 4; ++j) pass = pass && a.values[j] == 2.0 * b.values[j];
            }
        }
    }
    detail("48 parameter points, all four curvatures compared exactly");
    return {pass, "SU(2) scaling"};
}

Outcome criterion8(int threads) {
    D1Config cfg;
    cfg.spec = d1_reference_spectrum();
    cfg.seed = 2026;
    cfg.threads = threads;
    const D1Verdict v = discriminate_d1(cfg);
    persist("d1_verdict.json", to_json(v));
    for (std::size_t k = 0; k < v.u.size(); ++k) {
        detail("u = " + fmt(v.u[k]) + ": boundary term mean " + format_double(v.boundary[k].mean) + " se " +
               fmt(v.boundary[k].se) + "; 1/sqrt(8 pi^3) gives " + format_double(v.candidates[0].prefactor * v.x[k]) +
               ", 1/sqrt(8 pi^2) gives " + format_double(v.candidates[1].prefactor * v.x[k]));
    }
    detail("fitted prefactor " + format_double(v.slope) + " +- " + fmt(v.slope_se) + " from " +
           std::to_string(v.trials - v.excluded) + " trials");
    for (const auto& c : v.candidates) detail(c.name + ": z " + fmt(c.z) + (c.within ? " (within 3 sigma)" : ""));
    detail("separation power " + fmt(v.power) + " sigma; verdict: " + v.verdict);
    const bool decided = v.verdict != "inconclusive" && v.power >= 3.0;
    const bool reported = v.verdict == "inconclusive" && std::isfinite(v.power);
    return {decided || reported, "d1 discrepancy finding: " + v.verdict};
}

std::vector<EulerPoint> haar_points(std::uint64_t seed, int n) {
    const Philox gen(seed);
    std::vector<EulerPoint> pts;
    for (std::uint32_t i = 0; static_cast<int>(pts.size()) < n; ++i) {
        const auto [a, b] = gen.uniforms({i, 0U, 0U, 0U});
        const auto [c, unused] = gen.uniforms({i, 1U, 0U, 0U});
        (void)unused;
        const double th = std::acos(1 - 2 * b);
        if (std::sin(th) < 1e-3) continue;
        pts.push_back({-pi + 2 * pi * a, th, -pi + 2 * pi * c});
    }
    return pts;
}

Outcome criterion9(int threads) {
    const int trials = 10000;
    bool pass = true;
    nlohmann::json out;
    for (const auto& [name, spec] : {std::pair{"reference", reference_spectrum()}, std::pair{"d1-reference", d1_reference_spectrum()}}) {
        const auto pts = haar_points(77, 8);
        const MetricReport m = validate_metric(spec, pts, trials, 91, threads);
        std::vector<std::pair<EulerPoint, EulerPoint>> pairs;
        const auto far = haar_points(78, 6);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            // near pairs, where the covariance is far from zero
            const EulerPoint& p = pts[i];
            pairs.push_back({p, {p.phi + 0.1 * (i + 1), std::clamp(p.theta + 0.05, 0.01, pi - 0.01), p.psi - 0.07 * i}});
        }
        for (std::size_t i = 0; i + 1 < far.size(); i += 2) pairs.push_back({far[i], far[i + 1]});
        pairs.push_back({pts[0], pts[0]});
        const CovarianceReport c = validate_covariance(spec, pairs, trials, 92, threads);
        detail(std::string(name) + ": gradient Gram " + std::to_string(m.entries.size()) + " entries, max |z| " +
               fmt(m.max_abs_z) + "; covariance " + std::to_string(c.pairs.size()) + " pairs, max |z| " +
               fmt(c.max_abs_z) + "; spin residual " + fmt(c.spin_residual));
        out[name] = {{"metric", to_json(m)}, {"covariance", to_json(c)}};
        pass = pass && m.max_abs_z <= 4.0 && c.max_abs_z <= 4.0 && c.spin_residual <= 1e-10;
    }
    persist("field_validation.json", out);
    return {pass, "statistical field validation"};
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) {
        g_results = argv[1];
        std::filesystem::create_directories(g_results);
    }
    const int threads = default_threads();
    const std::vector<std::function<Outcome()>> criteria{
        criterion1, criterion2, criterion3, criterion4, [&] { return criterion5(threads); }, criterion6, criterion7,
        [&] { return criterion8(threads); }, [&] { return criterion9(threads); }};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("raised: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.summary << "  ["
                  << fmt(secs) << " s]" << std::endl;
        failed += !o.pass;
    }
    std::cout << "acceptance: " << criteria.size() - failed << " of " << criteria.size() << " criteria pass\n";
    return failed == 0 ? 0 : 1;
}
