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

#include <vector>

#include "lkspin/chartfield.hpp"
#include "lkspin/so3geom.hpp"

namespace lkspin {

struct Resolution {
    int n_phi = 64;
    int n_theta = 64;
    int n_psi = 64;

    static Resolution cube(int n) { return {n, n, n}; }
};

// Field samples on the half-cell-offset product grid
//   phi_i = -pi + (i + 1/2) dphi, theta_j = (j + 1/2) dtheta, psi_k = -pi + (k + 1/2) dpsi.
// No node sits on a pole; phi and psi wrap around.
class EulerGrid {
public:
    EulerGrid(Resolution res, bool with_gradient);

    const Resolution& resolution() const { return res_; }
    int n_phi() const { return res_.n_phi; }
    int n_theta() const { return res_.n_theta; }
    int n_psi() const { return res_.n_psi; }
    std::size_t size() const { return values_.size(); }

    double dphi() const;
    double dtheta() const;
    double dpsi() const;
    double phi(int i) const;
    double theta(int j) const;
    double psi(int k) const;
    EulerPoint node(int i, int j, int k) const { return {phi(i), theta(j), psi(k)}; }

    // Flat node id; i and k are taken modulo the periodic extents.
    std::size_t id(int i, int j, int k) const;

    double value(std::size_t id) const { return values_[id]; }
    double value(int i, int j, int k) const { return values_[id(i, j, k)]; }
    bool has_gradient() const { return !grads_.empty(); }
    const Vec3& gradient(std::size_t id) const { return grads_[id]; }

    // Volume weight of the node's cell: dVol_g / (dphi dtheta dpsi) times the cell size.
    double cell_volume(int j, const LeftInvariantMetric& g = LeftInvariantMetric::standard()) const;

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<Vec3>& gradients() { return grads_; }

private:
    Resolution res_;
    std::vector<double> values_;
    std::vector<Vec3> grads_;
};

// Throws ConfigError if any axis has fewer than 8 nodes.
EulerGrid build_grid(const ChartField& field, Resolution res, bool with_gradient = true, int threads = 1);

} // namespace lkspin
