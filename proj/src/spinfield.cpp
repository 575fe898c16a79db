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

#include "lkspin/spinfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lkspin/errors.hpp"
#include "lkspin/rng.hpp"

namespace lkspin {

using cplx = std::complex<double>;

void ChartField::sample_theta_slice(double theta, const std::vector<double>& phis,
                                    const std::vector<double>& psis, double* values,
                                    Vec3* grads) const {
    std::size_t idx = 0;
    for (double phi : phis) {
        for (double psi : psis) {
            const EulerPoint p{phi, theta, psi};
            if (grads) {
                const FieldJet j = jet(p);
                values[idx] = j.value;
                grads[idx] = j.gradient;
            } else {
                values[idx] = value(p);
            }
            ++idx;
        }
    }
}

std::unique_ptr<ChartField> ChartField::left_translate(const EulerPoint&) const { return nullptr; }

std::unique_ptr<ChartField> FieldRealization::left_translate(const EulerPoint& p) const {
    return std::make_unique<FieldRealization>(left_translated(p));
}

void validate(const SpectrumSpec& spec) {
    if (spec.coeffs.empty()) throw DomainError("empty spectrum");
    for (const auto& [l, c] : spec.coeffs) {
        if (l < std::abs(spec.s)) {
            throw DomainError("spectrum degree l=" + std::to_string(l) + " below |s|=" +
                              std::to_string(std::abs(spec.s)));
        }
        if (!(c > 0.0) || !std::isfinite(c)) {
            throw DomainError("spectrum coefficient for l=" + std::to_string(l) + " must be positive");
        }
    }
}

SpectrumSpec normalize(SpectrumSpec spec) {
    validate(spec);
    double total = 0.0;
    for (const auto& [l, c] : spec.coeffs) total += 0.5 * c * c;
    const double scale = 1.0 / std::sqrt(total);
    for (auto& [l, c] : spec.coeffs) c *= scale;
    return spec;
}

bool is_normalized(const SpectrumSpec& spec, double tol) {
    double total = 0.0;
    for (const auto& [l, c] : spec.coeffs) total += 0.5 * c * c;
    return std::abs(total - 1.0) <= tol;
}

double xi_squared(const SpectrumSpec& spec) {
    validate(spec);
    double x2 = 0.0;
    const double s2 = static_cast<double>(spec.s) * spec.s;
    for (const auto& [l, c] : spec.coeffs) x2 += 0.5 * c * c * 0.5 * (l * (l + 1.0) - s2);
    return x2;
}

double circular_covariance(const SpectrumSpec& spec, double theta) {
    validate(spec);
    double k = 0.0;
    for (const auto& [l, c] : spec.coeffs) k += c * c * wigner_d({l, spec.s, spec.s}, theta);
    return k;
}

double covariance(const SpectrumSpec& spec, const EulerPoint& rel) {
    return 0.5 * std::cos(spec.s * (rel.phi + rel.psi)) * circular_covariance(spec, rel.theta);
}

LeftInvariantMetric induced_metric(const SpectrumSpec& spec) {
    return {std::sqrt(xi_squared(spec)), static_cast<double>(spec.s)};
}

nlohmann::json to_json(const SpectrumSpec& spec) {
    nlohmann::json coeffs = nlohmann::json::object();
    for (const auto& [l, c] : spec.coeffs) coeffs[std::to_string(l)] = c;
    return {{"s", spec.s}, {"coeffs", coeffs}};
}

SpectrumSpec spectrum_from_json(const nlohmann::json& j) {
    SpectrumSpec spec;
    try {
        spec.s = j.at("s").get<int>();
        for (const auto& [key, val] : j.at("coeffs").items()) {
            std::size_t used = 0;
            const int l = std::stoi(key, &used);
            if (used != key.size()) throw ConfigError("non-integer degree key '" + key + "'");
            spec.coeffs[l] = val.get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed spectrum: ") + e.what());
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const ConfigError*>(&e)) throw;
        throw ConfigError(std::string("malformed spectrum: ") + e.what());
    }
    validate(spec);
    return spec;
}

FieldRealization::FieldRealization(SpectrumSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
    validate(spec_);
    if (!is_normalized(spec_, 1e-9)) throw DomainError("spectrum must be normalized before sampling");
    xi_ = std::sqrt(xi_squared(spec_));
    const Philox gen(seed_);
    for (const auto& [l, c] : spec_.coeffs) {
        lmax_ = std::max(lmax_, l);
        for (int m = -l; m <= l; ++m) {
            const auto [z1, z2] = gen.normals({static_cast<std::uint32_t>(l),
                                               static_cast<std::uint32_t>(m), 0x6a3dU, 0U});
            const cplx g(z1 * std::sqrt(0.5), z2 * std::sqrt(0.5));
            modes_.push_back({l, m, c * g});
        }
    }
    build_fourier();
}

FieldRealization FieldRealization::left_translated(const EulerPoint& p) const {
    FieldRealization out = *this;
    out.left_ = left_ ? from_rotation(to_rotation(*left_) * to_rotation(p)) : p;
    for (Mode& md : out.modes_) {
        cplx w(0.0);
        for (const Mode& src : modes_) {
            if (src.l == md.l) w += src.weight * wigner_D({md.l, src.m, md.m}, p);
        }
        md.weight = w;
    }
    out.build_fourier();
    return out;
}

void FieldRealization::build_fourier() {
    const int n = 2 * lmax_ + 1;
    std::vector<WignerSeries> series;
    series.reserve(modes_.size());
    for (const Mode& md : modes_) series.emplace_back(WignerIndex{md.l, md.m, spec_.s});
    std::vector<cplx> fourier(static_cast<std::size_t>(n) * n, cplx(0.0));
    std::vector<cplx> b(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / n;
        const HalfAnglePowers h(theta, 2 * lmax_);
        std::fill(b.begin(), b.end(), cplx(0.0));
        for (std::size_t q = 0; q < modes_.size(); ++q)
            b[static_cast<std::size_t>(modes_[q].m + lmax_)] += modes_[q].weight * series[q].value(h);
        for (int m = -lmax_; m <= lmax_; ++m) {
            for (int k = -lmax_; k <= lmax_; ++k) {
                fourier[static_cast<std::size_t>(m + lmax_) * n + static_cast<std::size_t>(k + lmax_)] +=
                    b[static_cast<std::size_t>(m + lmax_)] * std::polar(1.0 / n, -k * theta);
            }
        }
    }
    // stored transposed, (k + lmax) major
    fourier_re_.resize(fourier.size());
    fourier_im_.resize(fourier.size());
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            const std::size_t src = static_cast<std::size_t>(m) * n + k, dst = static_cast<std::size_t>(k) * n + m;
            fourier_re_[dst] = fourier[src].real();
            fourier_im_[dst] = fourier[src].imag();
        }
    }
}

cplx FieldRealization::gamma(int l, int m) const {
    for (const Mode& md : modes_) {
        if (md.l == l && md.m == m) return md.weight / spec_.coeffs.at(l);
    }
    throw DomainError("no coefficient for (l=" + std::to_string(l) + ", m=" + std::to_string(m) + ")");
}

FieldRealization::ThetaRow FieldRealization::theta_row(double theta, bool second) const {
    ThetaRow row;
    const int n = 2 * lmax_ + 1;
    // e^{i k theta} and its first two theta-derivatives, split into real and imaginary parts
    std::array<double, kMaxRow> e0r, e0i, e1r, e1i, e2r, e2i;
    const double cs = std::cos(theta), sn = std::sin(theta);
    double er = std::cos(lmax_ * theta), ei = -std::sin(lmax_ * theta);
    for (int ik = 0; ik < n; ++ik) {
        const double k = ik - lmax_;
        e0r[ik] = er;
        e0i[ik] = ei;
        e1r[ik] = -k * ei;
        e1i[ik] = k * er;
        e2r[ik] = -k * k * er;
        e2i[ik] = -k * k * ei;
        const double nr = er * cs - ei * sn;
        ei = er * sn + ei * cs;
        er = nr;
    }
    // k outer, m inner: the accumulators are independent across m
    std::array<double, kMaxRow> br{}, bi{}, dr{}, di{}, d2r{}, d2i{};
    for (int ik = 0; ik < n; ++ik) {
        const double* fr = &fourier_re_[static_cast<std::size_t>(ik) * n];
        const double* fi = &fourier_im_[static_cast<std::size_t>(ik) * n];
        for (int im = 0; im < n; ++im) {
            br[im] += fr[im] * e0r[ik] - fi[im] * e0i[ik];
            bi[im] += fr[im] * e0i[ik] + fi[im] * e0r[ik];
            dr[im] += fr[im] * e1r[ik] - fi[im] * e1i[ik];
            di[im] += fr[im] * e1i[ik] + fi[im] * e1r[ik];
        }
        if (second) {
            for (int im = 0; im < n; ++im) {
                d2r[im] += fr[im] * e2r[ik] - fi[im] * e2i[ik];
                d2i[im] += fr[im] * e2i[ik] + fi[im] * e2r[ik];
            }
        }
    }
    for (int im = 0; im < n; ++im) {
        row.b[im] = {br[im], bi[im]};
        row.db[im] = {dr[im], di[im]};
        row.d2b[im] = {d2r[im], d2i[im]};
    }
    return row;
}

cplx FieldRealization::evaluate_complex(const EulerPoint& p) const {
    const ThetaRow row = theta_row(p.theta);
    cplx z(0.0);
    const cplx step = std::polar(1.0, -p.phi);
    cplx e = std::polar(1.0, lmax_ * p.phi);
    for (int m = -lmax_; m <= lmax_; ++m) {
        z += e * row.b[static_cast<std::size_t>(m + lmax_)];
        e *= step;
    }
    return z * std::polar(1.0, -spec_.s * p.psi);
}

FieldJet FieldRealization::jet(const EulerPoint& p) const {
    const ThetaRow row = theta_row(p.theta, true);
    // sums over m of e^{-i m phi} times B_m, B_m' and B_m'', with factors (-i m)^q
    double z0r = 0, z0i = 0, zfr = 0, zfi = 0, zffr = 0, zffi = 0;
    double ztr = 0, zti = 0, zttr = 0, ztti = 0, zftr = 0, zfti = 0;
    const double cs = std::cos(p.phi), sn = -std::sin(p.phi);
    double er = std::cos(lmax_ * p.phi), ei = std::sin(lmax_ * p.phi); // e^{-i m phi} at m = -lmax
    for (int m = -lmax_; m <= lmax_; ++m) {
        const std::size_t k = static_cast<std::size_t>(m + lmax_);
        const double md = m;
        const double br = er * row.b[k].real() - ei * row.b[k].imag(), bi = er * row.b[k].imag() + ei * row.b[k].real();
        const double dr = er * row.db[k].real() - ei * row.db[k].imag(), di = er * row.db[k].imag() + ei * row.db[k].real();
        const double d2r = er * row.d2b[k].real() - ei * row.d2b[k].imag();
        const double d2i = er * row.d2b[k].imag() + ei * row.d2b[k].real();
        z0r += br;
        z0i += bi;
        zfr += md * bi; // (-i m)(br + i bi)
        zfi -= md * br;
        zffr -= md * md * br;
        zffi -= md * md * bi;
        ztr += dr;
        zti += di;
        zttr += d2r;
        ztti += d2i;
        zftr += md * di;
        zfti -= md * dr;
        const double nr = er * cs - ei * sn;
        ei = er * sn + ei * cs;
        er = nr;
    }
    const double s = spec_.s;
    const double Er = std::cos(s * p.psi), Ei = -std::sin(s * p.psi);
    auto re = [&](double zr, double zi) { return Er * zr - Ei * zi; };  // Re(E z)
    auto im = [&](double zr, double zi) { return Er * zi + Ei * zr; };  // Im(E z)
    // Re(-i s E z) = s Im(E z)
    FieldJet j;
    j.value = re(z0r, z0i);
    j.gradient << re(zfr, zfi), re(ztr, zti), s * im(z0r, z0i);
    const double hff = re(zffr, zffi), hft = re(zftr, zfti), hfp = s * im(zfr, zfi);
    const double htt = re(zttr, ztti), htp = s * im(ztr, zti), hpp = -s * s * j.value;
    j.hessian << hff, hft, hfp,
                 hft, htt, htp,
                 hfp, htp, hpp;
    return j;
}

void FieldRealization::sample_theta_slice(double theta, const std::vector<double>& phis,
                                          const std::vector<double>& psis, double* values,
                                          Vec3* grads) const {
    const ThetaRow row = theta_row(theta, false);
    const double s = spec_.s;
    std::vector<cplx> epsi(psis.size());
    for (std::size_t k = 0; k < psis.size(); ++k) epsi[k] = std::polar(1.0, -s * psis[k]);
    std::size_t idx = 0;
    for (double phi : phis) {
        cplx z0(0.0), zf(0.0), zt(0.0);
        const cplx step = std::polar(1.0, -phi);
        cplx e = std::polar(1.0, lmax_ * phi); // e^{-i m phi} at m = -lmax
        for (int m = -lmax_; m <= lmax_; ++m) {
            const std::size_t k = static_cast<std::size_t>(m + lmax_);
            z0 += e * row.b[k];
            zf += cplx(0.0, -static_cast<double>(m)) * e * row.b[k];
            zt += e * row.db[k];
            e *= step;
        }
        for (std::size_t k = 0; k < psis.size(); ++k) {
            const cplx x = epsi[k] * z0;
            values[idx] = x.real();
            if (grads) grads[idx] = Vec3((epsi[k] * zf).real(), (epsi[k] * zt).real(), s * x.imag());
            ++idx;
        }
    }
}

nlohmann::json FieldRealization::to_json() const {
    nlohmann::json j{{"spec", lkspin::to_json(spec_)}, {"seed", seed_}};
    if (left_) j["left_rotation"] = {left_->phi, left_->theta, left_->psi};
    return j;
}

FieldRealization sample(const SpectrumSpec& spec, std::uint64_t seed) { return FieldRealization(spec, seed); }

FieldRealization realization_from_json(const nlohmann::json& j) {
    try {
        FieldRealization f(spectrum_from_json(j.at("spec")), j.at("seed").get<std::uint64_t>());
        if (j.contains("left_rotation")) {
            const auto& r = j.at("left_rotation");
            if (!r.is_array() || r.size() != 3) throw ConfigError("left_rotation must be three Euler angles");
            return f.left_translated({r[0].get<double>(), r[1].get<double>(), r[2].get<double>()});
        }
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed realization: ") + e.what());
    }
}

Vec3 chart_gradient(const ChartField& f, const EulerPoint& p) { return f.jet(p).gradient; }

Mat3 chart_hessian_raw(const ChartField& f, const EulerPoint& p) { return f.jet(p).hessian; }

Mat3 riemannian_hessian(const FieldJet& jet, double theta, const LeftInvariantMetric& g) {
    const Christoffel gm = christoffel(g, theta);
    Mat3 h = jet.hessian;
    for (int k = 0; k < 3; ++k) h -= gm.upper[k] * jet.gradient(k);
    return h;
}

Mat3 riemannian_hessian(const ChartField& f, const EulerPoint& p, const LeftInvariantMetric& g) {
    return riemannian_hessian(f.jet(p), p.theta, g);
}

} // namespace lkspin
