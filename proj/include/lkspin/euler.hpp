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

#include <Eigen/Dense>

namespace lkspin {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// ZYZ Euler coordinates: R = R3(phi) R2(theta) R3(psi).
// phi, psi in (-pi, pi], theta in [0, pi].
struct EulerPoint {
    double phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;
};

Mat3 rotation_z(double angle);
Mat3 rotation_y(double angle);
Mat3 to_rotation(const EulerPoint& p);

// Inverse of to_rotation. At the poles (theta = 0 or pi) only phi +/- psi is
// determined; psi is set to zero there.
EulerPoint from_rotation(const Mat3& r);

// Euler coordinates of p^{-1} q.
EulerPoint relative_rotation(const EulerPoint& p, const EulerPoint& q);

// Map an angle into (-pi, pi].
double wrap_angle(double a);

// Shortest signed angular difference a - b, in (-pi, pi].
double angle_diff(double a, double b);

} // namespace lkspin
