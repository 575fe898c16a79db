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

#include "lkspin/chartfield.hpp"

namespace lkspin {

// h = cos(theta): superlevel sets are tubes {theta <= theta0} with flat torus boundary.
class CosThetaField : public ChartField {
public:
    double value(const EulerPoint& p) const override;
    FieldJet jet(const EulerPoint& p) const override;
    std::unique_ptr<ChartField> left_translate(const EulerPoint& p) const override;
};

// h(R) = tr(Q^T R). For Q = V diag(a, b, c) with a > b > c > 0 this is a perfect
// Morse function with critical points V diag(+-1, +-1, +-1) of determinant one.
class TraceField : public ChartField {
public:
    explicit TraceField(const Mat3& q) : q_(q) {}
    double value(const EulerPoint& p) const override;
    FieldJet jet(const EulerPoint& p) const override;
    std::unique_ptr<ChartField> left_translate(const EulerPoint& p) const override;

private:
    Mat3 q_;
};

} // namespace lkspin
