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

#include "lkspin/fixtures.hpp"

#include <cmath>

namespace lkspin {

double CosThetaField::value(const EulerPoint& p) const { return std::cos(p.theta); }

FieldJet CosThetaField::jet(const EulerPoint& p) const {
    FieldJet j;
    j.value = std::cos(p.theta);
    j.gradient = Vec3(0.0, -std::sin(p.theta), 0.0);
    j.hessian.setZero();
    j.hessian(1, 1) = -std::cos(p.theta);
    return j;
}

// cos(theta) = tr(e3 e3^T R), a trace field; tr(Q^T p x) = tr((p^T Q)^T x).
std::unique_ptr<ChartField> CosThetaField::left_translate(const EulerPoint& p) const {
    return std::make_unique<TraceField>(to_rotation(p).transpose() * Vec3::UnitZ() * Vec3::UnitZ().transpose());
}

std::unique_ptr<ChartField> TraceField::left_translate(const EulerPoint& p) const {
    return std::make_unique<TraceField>(to_rotation(p).transpose() * q_);
}

double TraceField::value(const EulerPoint& p) const { return (q_.transpose() * to_rotation(p)).trace(); }

FieldJet TraceField::jet(const EulerPoint& p) const {
    // R = A(phi) B(theta) C(psi); each factor's derivatives are explicit.
    auto rz = [](double a, int order) {
        const double c = std::cos(a), s = std::sin(a);
        Mat3 m = Mat3::Zero();
        switch (order) {
        case 0: m << c, -s, 0, s, c, 0, 0, 0, 1; break;
        case 1: m << -s, -c, 0, c, -s, 0, 0, 0, 0; break;
        default: m << -c, s, 0, -s, -c, 0, 0, 0, 0; break;
        }
        return m;
    };
    auto ry = [](double a, int order) {
        const double c = std::cos(a), s = std::sin(a);
        Mat3 m = Mat3::Zero();
        switch (order) {
        case 0: m << c, 0, s, 0, 1, 0, -s, 0, c; break;
        case 1: m << -s, 0, c, 0, 0, 0, -c, 0, -s; break;
        default: m << -c, 0, -s, 0, 0, 0, s, 0, -c; break;
        }
        return m;
    };
    auto h = [&](int a, int b, int c) {
        return (q_.transpose() * rz(p.phi, a) * ry(p.theta, b) * rz(p.psi, c)).trace();
    };
    FieldJet j;
    j.value = h(0, 0, 0);
    j.gradient = Vec3(h(1, 0, 0), h(0, 1, 0), h(0, 0, 1));
    j.hessian << h(2, 0, 0), h(1, 1, 0), h(1, 0, 1),
                 h(1, 1, 0), h(0, 2, 0), h(0, 1, 1),
                 h(1, 0, 1), h(0, 1, 1), h(0, 0, 2);
    return j;
}

} // namespace lkspin
