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

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"
#include "lkspin/chartfield.hpp"
#include "lkspin/so3geom.hpp"
#include "lkspin/wigner.hpp"

namespace lkspin {

// Spin weight s and angular power coefficients c_l (finite support, l >= |s|).
struct SpectrumSpec {
    int s = 0;
    std::map<int, double> coeffs;
};

// Throws DomainError on an empty spectrum, l < |s| or c_l <= 0.
void validate(const SpectrumSpec& spec);

// Rescale so that sum c_l^2 / 2 = 1 (unit variance of f).
SpectrumSpec normalize(SpectrumSpec spec);

bool is_normalized(const SpectrumSpec& spec, double tol = 1e-12);

double xi_squared(const SpectrumSpec& spec);

// k(theta) = sum_l c_l^2 d^l_{ss}(theta).
double circular_covariance(const SpectrumSpec& spec, double theta);

// E[f(p) f(p R(phi, theta, psi))] = cos(s (phi + psi)) k(theta) / 2.
double covariance(const SpectrumSpec& spec, const EulerPoint& relative);

// Metric g_{xi,s} induced by the field.
LeftInvariantMetric induced_metric(const SpectrumSpec& spec);

nlohmann::json to_json(const SpectrumSpec& spec);
SpectrumSpec spectrum_from_json(const nlohmann::json& j);

// One draw of f = Re sum_l c_l sum_m gamma_{lm} D^l_{ms}.
class FieldRealization : public ChartField {
public:
    FieldRealization(SpectrumSpec spec, std::uint64_t seed);

    // The field x -> f(p x) for a fixed rotation p, again a spin field:
    // its coefficients are gamma'_{lk} = sum_m gamma_{lm} D^l_{mk}(p).
    FieldRealization left_translated(const EulerPoint& p) const;

    const SpectrumSpec& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }
    double xi() const { return xi_; }

    std::complex<double> gamma(int l, int m) const;

    std::complex<double> evaluate_complex(const EulerPoint& p) const;
    double evaluate(const EulerPoint& p) const { return evaluate_complex(p).real(); }

    double value(const EulerPoint& p) const override { return evaluate(p); }
    FieldJet jet(const EulerPoint& p) const override;
    double gradient_scale() const override { return xi_; }
    void sample_theta_slice(double theta, const std::vector<double>& phis,
                            const std::vector<double>& psis, double* values,
                            Vec3* grads) const override;
    std::unique_ptr<ChartField> left_translate(const EulerPoint& p) const override;

    // B_m(theta) = sum_l c_l gamma_{lm} d^l_{ms}(theta) and its theta-derivatives,
    // so that X = e^{-i s psi} sum_m e^{-i m phi} B_m(theta).
    static constexpr std::size_t kMaxRow = 2 * kWignerMaxDegree + 1;
    struct ThetaRow {
        std::array<std::complex<double>, kMaxRow> b, db, d2b; // indexed by m + lmax
    };
    ThetaRow theta_row(double theta, bool second = false) const;
    int lmax() const { return lmax_; }

    // Rotation applied on the left of the seeded draw, if any.
    const std::optional<EulerPoint>& left_rotation() const { return left_; }

    nlohmann::json to_json() const;

private:
    struct Mode {
        int l;
        int m;
        std::complex<double> weight; // c_l * gamma_{lm}
    };
    void build_fourier();

    SpectrumSpec spec_;
    std::uint64_t seed_;
    double xi_;
    int lmax_ = 0;
    std::vector<Mode> modes_;
    std::optional<EulerPoint> left_;
    // B_m(theta) = sum_k F_{mk} e^{i k theta}: each B_m is a trigonometric
    // polynomial of degree lmax, sampled once from the Wigner series. Real and
    // imaginary parts of F are stored apart, row-major in (k + lmax, m + lmax).
    std::vector<double> fourier_re_, fourier_im_;
};

FieldRealization sample(const SpectrumSpec& spec, std::uint64_t seed);
FieldRealization realization_from_json(const nlohmann::json& j);

Vec3 chart_gradient(const ChartField& f, const EulerPoint& p);
Mat3 chart_hessian_raw(const ChartField& f, const EulerPoint& p);

// Hess_{ij} = d_i d_j f - Gamma^k_{ij} d_k f.
Mat3 riemannian_hessian(const FieldJet& jet, double theta, const LeftInvariantMetric& g);
Mat3 riemannian_hessian(const ChartField& f, const EulerPoint& p, const LeftInvariantMetric& g);

} // namespace lkspin
