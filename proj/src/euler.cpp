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

#include "lkspin/euler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lkspin {

Mat3 rotation_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << c, -s, 0.0,
         s, c, 0.0,
         0.0, 0.0, 1.0;
    return r;
}

Mat3 rotation_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << c, 0.0, s,
         0.0, 1.0, 0.0,
         -s, 0.0, c;
    return r;
}

Mat3 to_rotation(const EulerPoint& p) {
    return rotation_z(p.phi) * rotation_y(p.theta) * rotation_z(p.psi);
}

EulerPoint from_rotation(const Mat3& r) {
    EulerPoint p;
    const double st = std::hypot(r(0, 2), r(1, 2));
    p.theta = std::atan2(st, std::clamp(r(2, 2), -1.0, 1.0));
    if (st > 1e-14) {
        p.phi = std::atan2(r(1, 2), r(0, 2));
        p.psi = std::atan2(r(2, 1), -r(2, 0));
    } else if (r(2, 2) > 0.0) {
        // R3(phi + psi)
        p.phi = std::atan2(r(1, 0), r(0, 0));
        p.psi = 0.0;
    } else {
        // lower row of the upper block is (-sin(phi - psi), cos(phi - psi))
        p.phi = std::atan2(-r(1, 0), r(1, 1));
        p.psi = 0.0;
    }
    p.phi = wrap_angle(p.phi);
    p.psi = wrap_angle(p.psi);
    return p;
}

EulerPoint relative_rotation(const EulerPoint& p, const EulerPoint& q) {
    return from_rotation(to_rotation(p).transpose() * to_rotation(q));
}

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(a, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    if (w > std::numbers::pi) w -= two_pi;
    return w;
}

double angle_diff(double a, double b) { return wrap_angle(a - b); }

} // namespace lkspin
