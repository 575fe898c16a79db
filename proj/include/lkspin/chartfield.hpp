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

#include <memory>
#include <vector>

#include "lkspin/euler.hpp"

namespace lkspin {

// Value, chart gradient and raw chart Hessian (second partials) at a point.
struct FieldJet {
    double value = 0.0;
    Vec3 gradient = Vec3::Zero();
    Mat3 hessian = Mat3::Zero();
};

// A smooth real function on SO(3) evaluated in the Euler chart. Estimators are
// written against this interface so deterministic fixtures and random spin
// fields share the same code path.
class ChartField {
public:
    virtual ~ChartField() = default;

    virtual double value(const EulerPoint& p) const = 0;
    virtual FieldJet jet(const EulerPoint& p) const = 0;

    // Natural size of |grad f| in the standard metric; sets the degeneracy cutoff.
    virtual double gradient_scale() const { return 1.0; }

    // Values and chart gradients on the tensor product phis x {theta} x psis,
    // written row-major with psi fastest. grads may be null.
    virtual void sample_theta_slice(double theta, const std::vector<double>& phis,
                                    const std::vector<double>& psis, double* values,
                                    Vec3* grads) const;

    // The field x -> f(p x), or null when the field has no such form. Left
    // translations are isometries of every left-invariant metric.
    virtual std::unique_ptr<ChartField> left_translate(const EulerPoint& p) const;
};

} // namespace lkspin
