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

#include <complex>
#include <vector>

#include "lkspin/euler.hpp"

namespace lkspin {

// Degree l, row index m (paired with phi), column index s (paired with psi).
struct WignerIndex {
    int l = 0;
    int m = 0;
    int s = 0;
};

// Largest supported degree. The explicit sum alternates in sign and, even in
// extended precision, unitarity degrades past 1e-10 beyond this degree.
inline constexpr int kWignerMaxDegree = 28;

// Throws DomainError unless 0 <= l <= kWignerMaxDegree, |m| <= l, |s| <= l.
void validate(const WignerIndex& idx);

// Powers cos(theta/2)^k and sin(theta/2)^k for k = 0..max_power (plus two spare).
struct HalfAnglePowers {
    HalfAnglePowers(double theta, int max_power);
    std::vector<long double> c;
    std::vector<long double> s;
};

// Value and first two theta-derivatives of d^l_{ms}(theta).
struct WignerJet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// The explicit finite sum for d^l_{ms}, with coefficients precomputed once so
// repeated evaluation at many theta only costs the monomials. Accumulates in
// long double; unitarity holds to 1e-10 up to kWignerMaxDegree.
class WignerSeries {
public:
    explicit WignerSeries(const WignerIndex& idx);

    const WignerIndex& index() const { return idx_; }
    int max_power() const { return 2 * idx_.l; }

    double value(const HalfAnglePowers& h) const;
    WignerJet jet(const HalfAnglePowers& h) const;

private:
    struct Term {
        long double coef;
        int a; // power of cos(theta/2)
        int b; // power of sin(theta/2)
    };
    WignerIndex idx_;
    std::vector<Term> terms_;
};

double wigner_d(const WignerIndex& idx, double theta);

// order 0, 1 or 2.
double wigner_d_deriv(const WignerIndex& idx, double theta, int order);

// D^l_{ms}(phi, theta, psi) = e^{-i m phi} d^l_{ms}(theta) e^{-i s psi}.
std::complex<double> wigner_D(const WignerIndex& idx, const EulerPoint& p);

} // namespace lkspin
