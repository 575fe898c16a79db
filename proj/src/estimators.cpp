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

#include "lkspin/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lkspin/errors.hpp"
#include "lkspin/parallel.hpp"

namespace lkspin {

namespace {

constexpr double pi = std::numbers::pi;

double resolve_eps(const ChartField& field, double eps_grad) {
    return eps_grad >= 0.0 ? eps_grad : 1e-8 * field.gradient_scale();
}

struct NormalFrame {
    Mat3 gi;
    Vec3 n;      // unit normal along grad f (contravariant)
    double norm; // |grad f|_g
};

NormalFrame normal_frame(const FieldJet& jet, double theta, const LeftInvariantMetric& g, double eps_grad) {
    NormalFrame fr;
    fr.gi = gram_inverse(g, theta);
    const Vec3 up = fr.gi * jet.gradient;
    fr.norm = std::sqrt(std::max(0.0, jet.gradient.dot(up)));
    if (!(fr.norm > eps_grad)) throw DegeneratePointError("gradient vanishes at the evaluation point");
    fr.n = up / fr.norm;
    return fr;
}

} // namespace

double estimate_L3(const EulerGrid& grid, double u, const LeftInvariantMetric& g) {
    double vol = 0.0;
    const std::size_t slice = static_cast<std::size_t>(grid.n_phi()) * grid.n_psi();
    for (int j = 0; j < grid.n_theta(); ++j) {
        std::size_t count = 0;
        const std::size_t base = static_cast<std::size_t>(j) * slice;
        for (std::size_t q = 0; q < slice; ++q) count += grid.value(base + q) >= u;
        vol += static_cast<double>(count) * grid.cell_volume(j, g);
    }
    return vol;
}

double estimate_L2(const LevelSurfaceMesh& mesh) { return 0.5 * mesh.total_area(); }

double estimate_L2(const SurfaceIntegrals& s) { return 0.5 * s.surface_area; }

namespace {

// Integral of q_+^(-1/2) over [-a, a] x [-b, b] for q = q0 + p x + r y.
// (4 / 3pr) q_+^(3/2) is a mixed antiderivative.
double inverse_sqrt_cell(double q0, double p, double r, double a, double b) {
    const double pa = std::abs(p) * a, rb = std::abs(r) * b, scale = std::abs(q0) + pa + rb;
    auto pow32 = [](double q) { return q > 0.0 ? q * std::sqrt(q) : 0.0; };
    auto sqrt_plus = [](double q) { return q > 0.0 ? std::sqrt(q) : 0.0; };
    if (pa + rb <= 1e-3 * scale) return q0 > 0.0 ? 4.0 * a * b / std::sqrt(q0) : 0.0;
    if (rb <= 1e-4 * scale) return 2.0 * b * 2.0 / std::abs(p) * std::abs(sqrt_plus(q0 + p * a) - sqrt_plus(q0 - p * a));
    if (pa <= 1e-4 * scale) return 2.0 * a * 2.0 / std::abs(r) * std::abs(sqrt_plus(q0 + r * b) - sqrt_plus(q0 - r * b));
    auto F = [&](double x, double y) { return pow32(q0 + p * x + r * y); };
    return 4.0 / (3.0 * p * r) * (F(a, b) - F(-a, b) - F(a, -b) + F(-a, -b));
}

// Integral of q_+^(-1/2) for q = |b0 + bx x + by y|^2 - u^2 over [-a, a] x [-b, b]. The
// quadratic part matters near zeros of b0 + ...; there the cell is split and each
// piece uses the linearization of q at its centre.
double inverse_sqrt_model(std::complex<double> b0, std::complex<double> bx, std::complex<double> by, double u,
                          double a, double b, int depth) {
    const double q0 = std::norm(b0) - u * u;
    const double qx = 2.0 * (std::conj(b0) * bx).real(), qy = 2.0 * (std::conj(b0) * by).real();
    const double quad = std::norm(bx) * a * a + std::norm(by) * b * b;
    if (depth > 0 && quad > 1e-3 * (std::abs(q0) + std::abs(qx) * a + std::abs(qy) * b)) {
        double sum = 0.0;
        for (double sx : {-0.5, 0.5}) {
            for (double sy : {-0.5, 0.5})
                sum += inverse_sqrt_model(b0 + sx * a * bx + sy * b * by, bx, by, u, 0.5 * a, 0.5 * b, depth - 1);
        }
        return sum;
    }
    return inverse_sqrt_cell(q0, qx, qy, a, b);
}

} // namespace

double estimate_L2_crossings(const FieldRealization& field, double u, int base_phi, int base_theta, int max_depth) {
    if (base_phi < 1 || base_theta < 1) throw ConfigError("crossing estimator needs a positive base grid");
    if (max_depth < 0) throw ConfigError("crossing refinement depth must be non-negative");
    const int s = field.spec().s;
    if (s == 0) throw DomainError("crossing estimator needs s != 0");
    const LeftInvariantMetric g = LeftInvariantMetric::standard();
    const int lmax = field.lmax();
    // Along a psi-line f = |B| cos(s psi - arg B), so |d_psi f| = |s| sqrt(|B|^2 - u^2) at
    // every crossing. Each (phi, theta) cell contributes G / sqrt(q) with q = |B|^2 - u^2 and
    // G = sin(theta) sum_{crossings} |grad f|_g / |s|: G is taken at the cell centre and
    // q_+^(-1/2) is integrated in closed form on a local model of B, so the fold q = 0
    // (psi-lines tangent to the level set) costs no accuracy.
    auto cell = [&](auto&& self, double phi, double theta, double dphi, double dth, int depth) -> double {
        const auto row = field.theta_row(theta);
        std::complex<double> b(0.0), bf(0.0), bt(0.0);
        const std::complex<double> step = std::polar(1.0, -phi);
        std::complex<double> e = std::polar(1.0, lmax * phi);
        for (int m = -lmax; m <= lmax; ++m) {
            const std::size_t k = static_cast<std::size_t>(m + lmax);
            b += e * row.b[k];
            bf += std::complex<double>(0.0, -static_cast<double>(m)) * e * row.b[k];
            bt += e * row.db[k];
            e *= step;
        }
        const double rho = std::abs(b);
        const double q0 = rho * rho - u * u;
        const double qf = 2.0 * (std::conj(b) * bf).real(), qt = 2.0 * (std::conj(b) * bt).real();
        const double reach = 0.5 * (std::abs(qf) * dphi + std::abs(qt) * dth);
        if (q0 <= -reach || rho == 0.0) return 0.0;
        if (depth < max_depth && std::abs(q0) < reach) {
            double sum = 0.0;
            for (double sf : {-0.25, 0.25}) {
                for (double st : {-0.25, 0.25})
                    sum += self(self, phi + sf * dphi, theta + st * dth, 0.5 * dphi, 0.5 * dth, depth + 1);
            }
            return sum;
        }
        const Mat3 gi = gram_inverse(g, theta);
        const double beta = std::arg(b), alpha = std::acos(std::clamp(u / rho, -1.0, 1.0));
        double grad_sum = 0.0;
        for (int r = 0; r < std::abs(s); ++r) {
            for (double sign : {1.0, -1.0}) {
                // s psi = beta + sign*alpha + 2 pi r (all |s| periods are covered)
                const double psi = (beta + sign * alpha + 2.0 * pi * r) / s;
                const auto ep = std::polar(1.0, -s * psi);
                const Vec3 df((ep * bf).real(), (ep * bt).real(), s * (ep * b).imag());
                grad_sum += std::sqrt(std::max(0.0, df.dot(gi * df)));
            }
        }
        return std::sin(theta) * grad_sum / std::abs(s) * inverse_sqrt_model(b, bf, bt, u, 0.5 * dphi, 0.5 * dth, 12);
    };
    const double dphi = 2.0 * pi / base_phi, dth = pi / base_theta;
    double area = 0.0;
    for (int j = 0; j < base_theta; ++j) {
        for (int i = 0; i < base_phi; ++i) area += cell(cell, -pi + (i + 0.5) * dphi, (j + 0.5) * dth, dphi, dth, 0);
    }
    return 0.5 * area;
}

double mean_out_curvature(const FieldJet& jet, double theta, const LeftInvariantMetric& g, double eps_grad) {
    const NormalFrame fr = normal_frame(jet, theta, g, eps_grad);
    const Mat3 hess = riemannian_hessian(jet, theta, g);
    const double trace = (fr.gi * hess).trace();
    return 0.5 * (trace - fr.n.dot(hess * fr.n)) / fr.norm;
}

double mean_out_curvature(const ChartField& field, const EulerPoint& p, const LeftInvariantMetric& g, double eps_grad) {
    return mean_out_curvature(field.jet(p), p.theta, g, resolve_eps(field, eps_grad));
}

namespace {

struct LevelCurvature {
    double mean = 0.0;      // mean outer curvature
    double extrinsic = 0.0; // det of the second fundamental form
    double intrinsic = 0.0; // Gaussian curvature of the induced metric
};

LevelCurvature level_curvature(const FieldJet& jet, double theta, const LeftInvariantMetric& g, double eps_grad) {
    const NormalFrame fr = normal_frame(jet, theta, g, eps_grad);
    const Mat3 gm = gram(g, theta);
    const Mat3 hess = riemannian_hessian(jet, theta, g);
    LevelCurvature c;
    c.mean = 0.5 * ((fr.gi * hess).trace() - fr.n.dot(hess * fr.n)) / fr.norm;
    // tangent frame: Gram-Schmidt on the two coordinate axes least aligned with the normal
    int drop = 0;
    double best = -1.0;
    for (int a = 0; a < 3; ++a) {
        const Vec3 e = Vec3::Unit(a);
        const double align = std::abs(e.dot(gm * fr.n)) / std::sqrt(e.dot(gm * e));
        if (align > best) {
            best = align;
            drop = a;
        }
    }
    Vec3 t[2];
    int nt = 0;
    for (int a = 0; a < 3; ++a) {
        if (a == drop) continue;
        Vec3 v = Vec3::Unit(a);
        v -= v.dot(gm * fr.n) * fr.n;
        for (int b = 0; b < nt; ++b) v -= v.dot(gm * t[b]) * t[b];
        t[nt++] = v / std::sqrt(v.dot(gm * v));
    }
    const double s11 = t[0].dot(hess * t[0]) / fr.norm;
    const double s22 = t[1].dot(hess * t[1]) / fr.norm;
    const double s12 = t[0].dot(hess * t[1]) / fr.norm;
    Vec3 bp;
    bp << t[0](0) * t[1](1) - t[0](1) * t[1](0), t[0](0) * t[1](2) - t[0](2) * t[1](0),
        t[0](1) * t[1](2) - t[0](2) * t[1](1);
    c.extrinsic = s11 * s22 - s12 * s12;
    c.intrinsic = c.extrinsic - bp.dot(riemann04(g, theta) * bp);
    return c;
}

} // namespace

double level_gauss_curvature(const FieldJet& jet, double theta, const LeftInvariantMetric& g, double eps_grad) {
    return level_curvature(jet, theta, g, eps_grad).intrinsic;
}

LevelProjection project_to_level(const ChartField& field, EulerPoint p, double u, const LeftInvariantMetric& g,
                                 double max_step) {
    LevelProjection out;
    for (int it = 0; it < 6; ++it) {
        const FieldJet jet = field.jet(p);
        const double r = jet.value - u;
        if (std::abs(r) <= 1e-13 * (1.0 + std::abs(u))) break;
        const Vec3 up = gram_inverse(g, p.theta) * jet.gradient;
        const double norm2 = jet.gradient.dot(up);
        if (!(norm2 > 0.0)) break;
        Vec3 step = -r / norm2 * up;
        const double len = step.cwiseAbs().maxCoeff();
        if (len > max_step) step *= max_step / len;
        const EulerPoint q{p.phi + step(0), p.theta + step(1), p.psi + step(2)};
        if (!(q.theta > 1e-6 && q.theta < pi - 1e-6)) break;
        const double length = std::sqrt(step.dot(gram(g, 0.5 * (p.theta + q.theta)) * step));
        out.distance += r > 0.0 ? length : -length;
        p = q;
    }
    p.phi = wrap_angle(p.phi);
    p.psi = wrap_angle(p.psi);
    out.point = p;
    return out;
}

SurfaceIntegrals& SurfaceIntegrals::operator+=(const SurfaceIntegrals& o) {
    area += o.area;
    surface_area += o.surface_area;
    mean_curvature += o.mean_curvature;
    gauss_curvature += o.gauss_curvature;
    skipped_area += o.skipped_area;
    skipped_triangles += o.skipped_triangles;
    return *this;
}

double primary_chart_weight(double theta) {
    const double d = std::min(theta, pi - theta);
    const double x = (d - pi / 6.0) / (pi / 12.0);
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double s = std::sin(0.5 * pi * x);
    return s * s;
}

namespace {

double chart_weight(const EulerPoint& p, ChartRole role) {
    switch (role) {
    case ChartRole::Primary: return primary_chart_weight(p.theta);
    case ChartRole::Secondary: {
        const double c = (to_rotation(kSecondChart) * to_rotation(p))(2, 2);
        return 1.0 - primary_chart_weight(std::acos(std::clamp(c, -1.0, 1.0)));
    }
    default: return 1.0;
    }
}

} // namespace

SurfaceIntegrals integrate_surface(const ChartField& field, const LevelSurfaceMesh& mesh, const LeftInvariantMetric& g,
                                   double eps_grad, int threads, ChartRole role) {
    const double eps = resolve_eps(field, eps_grad);
    const std::size_t n = mesh.triangles.size();
    std::vector<double> h(n, 0.0), k(n, 0.0), w(n, 0.0), cw(n, 0.0);
    std::vector<char> skipped(n, 0);
    parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
            const EulerPoint c0 = triangle_centroid(mesh, t);
            cw[t] = chart_weight(c0, role);
            if (cw[t] == 0.0) continue;
            const auto& tri = mesh.triangles[t];
            const Vec3 e1 = chart_delta(mesh.vertices[tri[0]], mesh.vertices[tri[1]]);
            const Vec3 e2 = chart_delta(mesh.vertices[tri[0]], mesh.vertices[tri[2]]);
            const double edge = std::max({e1.cwiseAbs().maxCoeff(), e2.cwiseAbs().maxCoeff(), (e2 - e1).cwiseAbs().maxCoeff()});
            try {
                const LevelProjection proj = project_to_level(field, c0, mesh.level, g, edge);
                const EulerPoint& c = proj.point;
                const double offset = -proj.distance; // along the outer normal
                const FieldJet jet = field.jet(c);
                const LevelCurvature lc = level_curvature(jet, c.theta, g, eps);
                h[t] = lc.mean;
                k[t] = lc.intrinsic;
                // Area of the triangle's normal projection onto the level set: tilt
                // between the facet and the surface, then the parallel-surface factor
                // for the centroid's signed offset along the outer normal.
                const Mat3 gi = gram_inverse(g, c.theta);
                const Vec3 facet = e1.cross(e2);
                const double tilt = std::abs(facet.dot(gi * jet.gradient)) /
                                    std::sqrt(facet.dot(gi * facet) * jet.gradient.dot(gi * jet.gradient));
                const double parallel = 1.0 - 2.0 * lc.mean * offset + lc.extrinsic * offset * offset;
                // Offsets comparable to the curvature radius (blobs spanning a few
                // cells) make the factor unreliable; cap the weight's growth at 2.
                w[t] = tilt / std::max(parallel, 0.5);
            } catch (const DegeneratePointError&) {
                skipped[t] = 1;
            }
        }
    });
    SurfaceIntegrals s;
    for (std::size_t t = 0; t < n; ++t) {
        if (cw[t] == 0.0) continue;
        const double a = cw[t] * mesh.areas[t];
        s.area += a;
        if (skipped[t]) {
            s.skipped_area += a;
            ++s.skipped_triangles;
            continue;
        }
        s.surface_area += w[t] * a;
        s.mean_curvature += h[t] * w[t] * a;
        s.gauss_curvature += k[t] * w[t] * a;
    }
    return s;
}

SurfaceIntegrator::SurfaceIntegrator(const ChartField& field, const EulerGrid& grid, bool two_charts, int threads)
    : field_(field), grid_(grid), threads_(threads) {
    if (two_charts) second_ = field.left_translate(kSecondChart);
    if (second_) second_grid_ = build_grid(*second_, grid.resolution(), true, threads);
}

SurfaceIntegrals SurfaceIntegrator::integrate(double u, const LeftInvariantMetric& g) const {
    const LevelSurfaceMesh mesh = extract_level_surface(grid_, u, g);
    if (!second_) return integrate_surface(field_, mesh, g, -1.0, threads_);
    SurfaceIntegrals s = integrate_surface(field_, mesh, g, -1.0, threads_, ChartRole::Primary);
    s += integrate_surface(*second_, extract_level_surface(*second_grid_, u, g), g, -1.0, threads_,
                           ChartRole::Secondary);
    return s;
}

L1Estimate estimate_L1(const SurfaceIntegrals& s, double l3, const LeftInvariantMetric& g) {
    L1Estimate r;
    r.boundary_term = -s.mean_curvature / pi;
    r.volume_term = scalar_curvature(g) * l3 / (4.0 * pi);
    r.value = r.boundary_term + r.volume_term;
    r.skipped_area_fraction = s.skipped_fraction();
    return r;
}

L1Estimate estimate_L1(const ChartField& field, const LevelSurfaceMesh& mesh, const EulerGrid& grid, double u) {
    return estimate_L1(integrate_surface(field, mesh), estimate_L3(grid, u));
}

L0Estimate estimate_L0_gaussbonnet(const SurfaceIntegrals& s) {
    return {s.gauss_curvature / (4.0 * pi), s.skipped_fraction()};
}

L0Estimate estimate_L0_gaussbonnet(const ChartField& field, const LevelSurfaceMesh& mesh) {
    return estimate_L0_gaussbonnet(integrate_surface(field, mesh));
}

std::string to_string(L0Method m) { return m == L0Method::Morse ? "morse" : "gauss-bonnet"; }
std::string to_string(L2Method m) { return m == L2Method::Crossings ? "crossings" : "mesh"; }

L0Method l0_method_from_string(const std::string& name) {
    if (name == "gauss-bonnet") return L0Method::GaussBonnet;
    if (name == "morse") return L0Method::Morse;
    throw ConfigError("unknown L0 method: " + name);
}

L2Method l2_method_from_string(const std::string& name) {
    if (name == "mesh") return L2Method::Mesh;
    if (name == "crossings") return L2Method::Crossings;
    throw ConfigError("unknown L2 method: " + name);
}

LKVector EstimatorReport::lk(const EstimatorOptions& opt) const {
    LKVector v;
    v.values[0] = (opt.l0 == L0Method::Morse && L0_morse) ? *L0_morse : L0_gb;
    v.values[1] = L1;
    v.values[2] = L2;
    v.values[3] = L3;
    return v;
}

nlohmann::json to_json(const EstimatorReport& r) {
    nlohmann::json j;
    j["u"] = r.u;
    j["L0_gb"] = r.L0_gb;
    j["L0_morse"] = r.L0_morse ? nlohmann::json(*r.L0_morse) : nlohmann::json(nullptr);
    j["L1"] = r.L1;
    j["L2"] = r.L2;
    j["L3"] = r.L3;
    j["skipped_area_fraction"] = r.skipped_area_fraction;
    j["reliable"] = r.reliable;
    j["flags"] = r.flags;
    return j;
}

std::vector<EstimatorReport> estimate_all(const ChartField& field, const EulerGrid& grid,
                                          const std::vector<double>& thresholds, const EstimatorOptions& opt) {
    const LeftInvariantMetric g = LeftInvariantMetric::standard();
    const auto* realization = dynamic_cast<const FieldRealization*>(&field);
    if (opt.l2 == L2Method::Crossings && realization == nullptr)
        throw ConfigError("crossing-based L2 needs a spin field realization");
    std::optional<CriticalSet> crit;
    if (opt.morse || opt.l0 == L0Method::Morse) crit = find_critical_points(field, grid, opt.threads);
    const SurfaceIntegrator surfaces(field, grid, opt.two_charts, opt.threads);

    std::vector<EstimatorReport> out;
    out.reserve(thresholds.size());
    for (double u : thresholds) {
        EstimatorReport r;
        r.u = u;
        const SurfaceIntegrals si = surfaces.integrate(u, g);
        r.L3 = estimate_L3(grid, regularized_level(grid, u), g);
        const L1Estimate l1 = estimate_L1(si, r.L3, g);
        r.L1 = l1.value;
        r.L1_boundary = l1.boundary_term;
        r.L0_gb = estimate_L0_gaussbonnet(si).value;
        r.L2 = opt.l2 == L2Method::Crossings
                   ? estimate_L2_crossings(*realization, u, 2 * grid.n_phi(), 2 * grid.n_theta())
                   : estimate_L2(si);
        r.skipped_area_fraction = si.skipped_fraction();
        if (r.skipped_area_fraction > kMaxSkippedAreaFraction) {
            r.reliable = false;
            r.flags.push_back("skipped-area");
        }
        if (crit) {
            r.L0_morse = morse_count(*crit, u);
            if (!crit->reliable()) {
                if (opt.l0 == L0Method::Morse) r.reliable = false;
                r.flags.push_back(crit->flagged_cells ? "unresolved-critical-cell" : "degenerate-critical-point");
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace lkspin
