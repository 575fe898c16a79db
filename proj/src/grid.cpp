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

#include "lkspin/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "lkspin/errors.hpp"
#include "lkspin/parallel.hpp"

namespace lkspin {

namespace {
constexpr double pi = std::numbers::pi;
}

int default_threads() {
    if (const char* env = std::getenv("LKSPIN_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

EulerGrid::EulerGrid(Resolution res, bool with_gradient) : res_(res) {
    if (res.n_phi < 8 || res.n_theta < 8 || res.n_psi < 8) {
        throw ConfigError("grid resolution must be at least 8 per axis (got " + std::to_string(res.n_phi) + "x" +
                          std::to_string(res.n_theta) + "x" + std::to_string(res.n_psi) + ")");
    }
    const std::size_t n = static_cast<std::size_t>(res.n_phi) * res.n_theta * res.n_psi;
    values_.assign(n, 0.0);
    if (with_gradient) grads_.assign(n, Vec3::Zero());
}

double EulerGrid::dphi() const { return 2.0 * pi / res_.n_phi; }
double EulerGrid::dtheta() const { return pi / res_.n_theta; }
double EulerGrid::dpsi() const { return 2.0 * pi / res_.n_psi; }
double EulerGrid::phi(int i) const { return -pi + (i + 0.5) * dphi(); }
double EulerGrid::theta(int j) const { return (j + 0.5) * dtheta(); }
double EulerGrid::psi(int k) const { return -pi + (k + 0.5) * dpsi(); }

std::size_t EulerGrid::id(int i, int j, int k) const {
    i %= res_.n_phi;
    if (i < 0) i += res_.n_phi;
    k %= res_.n_psi;
    if (k < 0) k += res_.n_psi;
    return (static_cast<std::size_t>(j) * res_.n_phi + i) * res_.n_psi + k;
}

double EulerGrid::cell_volume(int j, const LeftInvariantMetric& g) const {
    return volume_element(g, theta(j)) * dphi() * dtheta() * dpsi();
}

EulerGrid build_grid(const ChartField& field, Resolution res, bool with_gradient, int threads) {
    EulerGrid grid(res, with_gradient);
    std::vector<double> phis(res.n_phi), psis(res.n_psi);
    for (int i = 0; i < res.n_phi; ++i) phis[i] = grid.phi(i);
    for (int k = 0; k < res.n_psi; ++k) psis[k] = grid.psi(k);
    const std::size_t slice = static_cast<std::size_t>(res.n_phi) * res.n_psi;
    parallel_for(static_cast<std::size_t>(res.n_theta), threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t j = b; j < e; ++j) {
            field.sample_theta_slice(grid.theta(static_cast<int>(j)), phis, psis, grid.values().data() + j * slice,
                                     with_gradient ? grid.gradients().data() + j * slice : nullptr);
        }
    });
    return grid;
}

} // namespace lkspin
