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

#include "lkspin/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lkspin/errors.hpp"

namespace lkspin {

namespace {

long double log_factorial(int n) { return std::lgammal(static_cast<long double>(n) + 1.0L); }

} // namespace

void validate(const WignerIndex& idx) {
    if (idx.l < 0 || idx.l > kWignerMaxDegree || std::abs(idx.m) > idx.l || std::abs(idx.s) > idx.l) {
        throw DomainError("invalid Wigner index (l=" + std::to_string(idx.l) + ", m=" +
                          std::to_string(idx.m) + ", s=" + std::to_string(idx.s) + ")");
    }
}

HalfAnglePowers::HalfAnglePowers(double theta, int max_power)
    : c(static_cast<std::size_t>(max_power) + 3), s(static_cast<std::size_t>(max_power) + 3) {
    const long double ch = std::cos(0.5L * theta), sh = std::sin(0.5L * theta);
    c[0] = 1.0L;
    s[0] = 1.0L;
    for (std::size_t k = 1; k < c.size(); ++k) {
        c[k] = c[k - 1] * ch;
        s[k] = s[k - 1] * sh;
    }
}

WignerSeries::WignerSeries(const WignerIndex& idx) : idx_(idx) {
    validate(idx);
    const int l = idx.l, m = idx.m, s = idx.s;
    const long double norm = 0.5L * (log_factorial(l + m) + log_factorial(l - m) +
                               log_factorial(l + s) + log_factorial(l - s));
    const int kmin = std::max(0, s - m);
    const int kmax = std::min(l + s, l - m);
    for (int k = kmin; k <= kmax; ++k) {
        const long double lc = norm - log_factorial(l + s - k) - log_factorial(k) -
                          log_factorial(m - s + k) - log_factorial(l - m - k);
        const long double sign = ((m - s + k) % 2 == 0) ? 1.0L : -1.0L;
        terms_.push_back({sign * std::exp(lc), 2 * l + s - m - 2 * k, m - s + 2 * k});
    }
}

double WignerSeries::value(const HalfAnglePowers& h) const {
    long double v = 0.0L;
    for (const Term& t : terms_) v += t.coef * h.c[t.a] * h.s[t.b];
    return static_cast<double>(v);
}

WignerJet WignerSeries::jet(const HalfAnglePowers& h) const {
    // d/dtheta cos(theta/2) = -sin(theta/2)/2, d/dtheta sin(theta/2) = cos(theta/2)/2
    long double v = 0.0L, v1 = 0.0L, v2 = 0.0L;
    for (const Term& t : terms_) {
        const int a = t.a, b = t.b;
        v += t.coef * h.c[a] * h.s[b];
        long double d1 = 0.0L;
        if (a > 0) d1 -= a * h.c[a - 1] * h.s[b + 1];
        if (b > 0) d1 += b * h.c[a + 1] * h.s[b - 1];
        v1 += t.coef * d1;
        long double d2 = -static_cast<long double>(a * (b + 1) + b * (a + 1)) * h.c[a] * h.s[b];
        if (a > 1) d2 += static_cast<long double>(a * (a - 1)) * h.c[a - 2] * h.s[b + 2];
        if (b > 1) d2 += static_cast<long double>(b * (b - 1)) * h.c[a + 2] * h.s[b - 2];
        v2 += t.coef * d2;
    }
    return {static_cast<double>(v), static_cast<double>(0.5L * v1), static_cast<double>(0.25L * v2)};
}

double wigner_d(const WignerIndex& idx, double theta) {
    WignerSeries series(idx);
    return series.value(HalfAnglePowers(theta, series.max_power()));
}

double wigner_d_deriv(const WignerIndex& idx, double theta, int order) {
    WignerSeries series(idx);
    const WignerJet j = series.jet(HalfAnglePowers(theta, series.max_power()));
    switch (order) {
    case 0: return j.value;
    case 1: return j.d1;
    case 2: return j.d2;
    default: throw DomainError("derivative order must be 0, 1 or 2");
    }
}

std::complex<double> wigner_D(const WignerIndex& idx, const EulerPoint& p) {
    const double d = wigner_d(idx, p.theta);
    return std::polar(d, -(idx.m * p.phi + idx.s * p.psi));
}

} // namespace lkspin
