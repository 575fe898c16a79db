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

#include "lkspin/critical.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "lkspin/errors.hpp"
#include "lkspin/parallel.hpp"

namespace lkspin {

namespace {

constexpr double pi = std::numbers::pi;

using Corners = std::array<Vec3, 8>;

// Common zero of the trilinear interpolant of the corner gradients inside the
// unit cell (small margin), by Newton from a few starts.
bool trilinear_has_zero(const Corners& c) {
    auto eval = [&](const Vec3& x, Vec3& f, Mat3& jac) {
        f.setZero();
        jac.setZero();
        for (int q = 0; q < 8; ++q) {
            const int bx = q & 1, by = (q >> 1) & 1, bz = (q >> 2) & 1;
            const double wx = bx ? x(0) : 1.0 - x(0), wy = by ? x(1) : 1.0 - x(1), wz = bz ? x(2) : 1.0 - x(2);
            const double sx = bx ? 1.0 : -1.0, sy = by ? 1.0 : -1.0, sz = bz ? 1.0 : -1.0;
            f += wx * wy * wz * c[q];
            jac.col(0) += sx * wy * wz * c[q];
            jac.col(1) += wx * sy * wz * c[q];
            jac.col(2) += wx * wy * sz * c[q];
        }
    };
    double scale = 0.0;
    for (const auto& v : c) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    if (scale == 0.0) return true;
    constexpr double margin = 0.05;
    for (int start = 0; start < 9; ++start) {
        Vec3 x = Vec3::Constant(0.5);
        if (start > 0) {
            const int q = start - 1;
            x << ((q & 1) ? 0.75 : 0.25), (((q >> 1) & 1) ? 0.75 : 0.25), (((q >> 2) & 1) ? 0.75 : 0.25);
        }
        for (int it = 0; it < 30; ++it) {
            Vec3 f;
            Mat3 jac;
            eval(x, f, jac);
            if (f.cwiseAbs().maxCoeff() <= 1e-12 * scale) break;
            const Eigen::FullPivLU<Mat3> lu(jac);
            if (!lu.isInvertible()) break;
            Vec3 step = lu.solve(f);
            const double len = step.cwiseAbs().maxCoeff();
            if (len > 0.5) step *= 0.5 / len;
            x -= step;
            if ((x.array() < -1.0).any() || (x.array() > 2.0).any()) break;
        }
        Vec3 f;
        Mat3 jac;
        eval(x, f, jac);
        const bool inside = (x.array() >= -margin).all() && (x.array() <= 1.0 + margin).all();
        if (inside && f.cwiseAbs().maxCoeff() <= 1e-9 * scale) return true;
    }
    return false;
}

struct NewtonResult {
    bool converged = false;
    EulerPoint point;
};

NewtonResult newton_critical(const ChartField& field, EulerPoint p, const Vec3& max_step) {
    for (int it = 0; it < 40; ++it) {
        const FieldJet jet = field.jet(p);
        const Eigen::FullPivLU<Mat3> lu(jet.hessian);
        if (!lu.isInvertible()) return {};
        Vec3 step = lu.solve(jet.gradient);
        const double ratio = (step.cwiseAbs().array() / max_step.array()).maxCoeff();
        if (ratio > 1.0) step /= ratio;
        p.phi -= step(0);
        p.theta -= step(1);
        p.psi -= step(2);
        if (!(p.theta > 0.0 && p.theta < pi)) return {};
        if ((step.cwiseAbs().array() / max_step.array()).maxCoeff() < 1e-11) {
            p.phi = wrap_angle(p.phi);
            p.psi = wrap_angle(p.psi);
            return {true, p};
        }
    }
    return {};
}

double chart_distance(const EulerPoint& a, const EulerPoint& b) {
    return std::max({std::abs(angle_diff(a.phi, b.phi)), std::abs(a.theta - b.theta), std::abs(angle_diff(a.psi, b.psi))});
}

// Cell (i, j, k) spans nodes i..i+1, j..j+1, k..k+1 in the periodic chart.
bool in_cell(const EulerGrid& grid, int i, int j, int k, const EulerPoint& p, double margin) {
    const double t0 = grid.theta(j) - margin * grid.dtheta(), t1 = grid.theta(j + 1) + margin * grid.dtheta();
    if (p.theta < t0 || p.theta > t1) return false;
    const double dp = wrap_angle(p.phi - grid.phi(i)), dq = wrap_angle(p.psi - grid.psi(k));
    auto inside = [margin](double d, double h) { return d >= -margin * h && d <= (1.0 + margin) * h; };
    return inside(dp, grid.dphi()) && inside(dq, grid.dpsi());
}

struct CellOutcome {
    bool candidate = false;
    std::optional<EulerPoint> found;
    bool unresolved = false;
};

} // namespace

CriticalSet find_critical_points(const ChartField& field, const EulerGrid& grid, int threads) {
    if (!grid.has_gradient()) throw ConfigError("critical point search needs grid gradients");
    const int ni = grid.n_phi(), nj = grid.n_theta() - 1, nk = grid.n_psi();
    const std::size_t ncell = static_cast<std::size_t>(ni) * nj * nk;
    std::vector<CellOutcome> out(ncell);
    const Vec3 max_step(grid.dphi(), grid.dtheta(), grid.dpsi());

    parallel_for(ncell, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t c = b; c < e; ++c) {
            const int k = static_cast<int>(c % nk);
            const int i = static_cast<int>((c / nk) % ni);
            const int j = static_cast<int>(c / (static_cast<std::size_t>(nk) * ni));
            Corners g;
            for (int q = 0; q < 8; ++q) g[q] = grid.gradient(grid.id(i + (q & 1), j + ((q >> 1) & 1), k + ((q >> 2) & 1)));
            bool change = true;
            for (int a = 0; a < 3 && change; ++a) {
                double lo = g[0](a), hi = g[0](a);
                for (const auto& v : g) {
                    lo = std::min(lo, v(a));
                    hi = std::max(hi, v(a));
                }
                change = lo <= 0.0 && hi >= 0.0;
            }
            if (!change || !trilinear_has_zero(g)) continue;
            CellOutcome& o = out[c];
            o.candidate = true;
            const EulerPoint centre{grid.phi(i) + 0.5 * grid.dphi(), grid.theta(j) + 0.5 * grid.dtheta(),
                                    grid.psi(k) + 0.5 * grid.dpsi()};
            const NewtonResult r = newton_critical(field, centre, max_step);
            if (r.converged) o.found = r.point;
        }
    });

    CriticalSet set;
    for (const auto& o : out) {
        if (!o.candidate) continue;
        ++set.candidate_cells;
        if (!o.found) continue;
        bool dup = false;
        for (const auto& cp : set.points) {
            if (chart_distance(cp.point, *o.found) < 1e-6) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        CriticalPoint cp;
        cp.point = *o.found;
        const FieldJet jet = field.jet(cp.point);
        cp.value = jet.value;
        const Eigen::SelfAdjointEigenSolver<Mat3> es(jet.hessian, Eigen::EigenvaluesOnly);
        for (int a = 0; a < 3; ++a) cp.index += es.eigenvalues()(a) < 0.0;
        cp.min_abs_eigen = es.eigenvalues().cwiseAbs().minCoeff();
        const double scale = field.gradient_scale() * field.gradient_scale();
        if (cp.min_abs_eigen < 1e-8 * std::max(scale, es.eigenvalues().cwiseAbs().maxCoeff())) ++set.degenerate_points;
        set.points.push_back(cp);
    }

    // A candidate cell whose Newton run failed is resolved if some critical
    // point lies in it (within half a cell); otherwise it stays flagged.
    for (std::size_t c = 0; c < ncell; ++c) {
        if (!out[c].candidate || out[c].found) continue;
        const int k = static_cast<int>(c % nk);
        const int i = static_cast<int>((c / nk) % ni);
        const int j = static_cast<int>(c / (static_cast<std::size_t>(nk) * ni));
        const bool resolved = std::any_of(set.points.begin(), set.points.end(),
                                          [&](const CriticalPoint& cp) { return in_cell(grid, i, j, k, cp.point, 0.5); });
        if (!resolved) ++set.flagged_cells;
    }

    std::sort(set.points.begin(), set.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return std::tie(a.point.theta, a.point.phi, a.point.psi) < std::tie(b.point.theta, b.point.phi, b.point.psi);
    });
    return set;
}

int morse_count(const CriticalSet& set, double u) {
    int chi = 0;
    for (const auto& cp : set.points) {
        if (cp.value >= u) chi += ((3 - cp.index) % 2 == 0) ? 1 : -1;
    }
    return chi;
}

MorseEstimate estimate_L0_morse(const CriticalSet& set, double u) { return {morse_count(set, u), set.reliable()}; }

MorseEstimate estimate_L0_morse(const ChartField& field, const EulerGrid& grid, double u) {
    return estimate_L0_morse(find_critical_points(field, grid), u);
}

} // namespace lkspin
