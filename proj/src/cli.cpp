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

#include "lkspin/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lkspin/errors.hpp"
#include "lkspin/estimators.hpp"
#include "lkspin/expectations.hpp"
#include "lkspin/format.hpp"
#include "lkspin/mc.hpp"
#include "lkspin/parallel.hpp"
#include "lkspin/rng.hpp"
#include "lkspin/so3geom.hpp"
#include "lkspin/version.hpp"

namespace lkspin {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kRangeSlack = 1e-12;
constexpr std::size_t kMaxRangeSize = 1000000;

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(x)) throw ConfigError("not a finite number: '" + text + "'");
    return x;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) parts.push_back(part);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

nlohmann::json matrix_json(const Mat3& m) {
    nlohmann::json j = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) j.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return j;
}

nlohmann::json lk_json(const std::array<double, 4>& v) {
    return {{"L0", v[0]}, {"L1", v[1]}, {"L2", v[2]}, {"L3", v[3]}};
}

// Options shared by every command.
struct Common {
    std::string out = "json";
    std::uint64_t seed = 1;
    int threads = 1;
    std::string output;
    bool timing = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    cmd->add_option("--threads", c.threads, "Worker cap (default LKSPIN_THREADS, else all cores)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--output", c.output, "Write results to this file instead of standard output");
    cmd->add_flag("--timing", c.timing, "Report wall time on the error stream and in manifests");
}

struct Emitted {
    std::string text;
    int code = kExitOk;
};

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string csv_row(std::initializer_list<double> values) {
    std::string row;
    for (double v : values) {
        if (!row.empty()) row += ',';
        row += format_double(v);
    }
    return row;
}

void require_spin_params(double xi, double s) {
    if (!(xi > 0.0) || s == 0.0 || !std::isfinite(xi) || !std::isfinite(s))
        throw DomainError("need xi > 0 and s != 0");
}

Eigentriple eigentriple(const std::array<double, 3>& abc) {
    const Eigentriple t{abc[0], abc[1], abc[2]};
    validate(t);
    return t;
}

Emitted cmd_expect(double xi, double s, const std::vector<double>& us, const std::string& manifold, const Common& c) {
    require_spin_params(xi, s);
    const Manifold m = manifold == "su2" ? Manifold::SU2 : Manifold::SO3;
    std::vector<ExpectedLK> rows;
    for (double u : us) rows.push_back(expected_lk_spin(xi, s, u, m));
    if (c.out == "csv") {
        std::string t = "u,EL0,EL1,EL2,EL3,regime\n";
        for (const auto& r : rows) {
            t += csv_row({r.u, r.values[0], r.values[1], r.values[2], r.values[3]}) + ',' + to_string(r.regime) + '\n';
        }
        return {t};
    }
    nlohmann::json j{{"xi", xi}, {"s", s}, {"manifold", manifold}, {"rows", nlohmann::json::array()}};
    for (const auto& r : rows) {
        j["rows"].push_back({{"u", r.u},
                             {"EL0", r.values[0]},
                             {"EL1", r.values[1]},
                             {"EL2", r.values[2]},
                             {"EL3", r.values[3]},
                             {"regime", to_string(r.regime)}});
    }
    return {dump(j)};
}

Emitted cmd_euclidean(const std::array<double, 3>& abc, const std::vector<double>& us, double volume, const Common& c) {
    const Eigentriple t = eigentriple(abc);
    if (!(volume > 0.0)) throw DomainError("volume must be positive");
    std::vector<EuclideanLK> rows;
    for (double u : us) rows.push_back(expected_lk_euclidean(t, u, volume));
    if (c.out == "csv") {
        std::string text = "u,EL0,EL1,EL2,EL3,gamma_sa,gamma_tmc,gamma_tgc\n";
        for (const auto& r : rows) {
            text += csv_row({r.lk.u, r.lk.values[0], r.lk.values[1], r.lk.values[2], r.lk.values[3], r.gamma_sa,
                             r.gamma_tmc, r.gamma_tgc}) + '\n';
        }
        return {text};
    }
    nlohmann::json j{{"eigentriple", abc}, {"volume", volume}, {"rows", nlohmann::json::array()}};
    if (!rows.empty()) {
        j["gamma_sa"] = rows[0].gamma_sa;
        j["gamma_tmc"] = rows[0].gamma_tmc;
        j["gamma_tgc"] = rows[0].gamma_tgc;
    }
    for (const auto& r : rows) {
        nlohmann::json row = lk_json(r.lk.values);
        row["u"] = r.lk.u;
        j["rows"].push_back(row);
    }
    return {dump(j)};
}

Emitted cmd_geometry(double xi, double s, const std::vector<double>& thetas, const Common& c) {
    require_spin_params(xi, s);
    const LeftInvariantMetric g{xi, s};
    const double scal = scalar_curvature(g);
    if (c.out == "csv") {
        std::string text = "theta,g00,g01,g02,g11,g12,g22,volume_element,scal,sec_phi_theta,sec_phi_psi,sec_theta_psi\n";
        for (double th : thetas) {
            const Mat3 m = gram(g, th);
            text += csv_row({th, m(0, 0), m(0, 1), m(0, 2), m(1, 1), m(1, 2), m(2, 2), volume_element(g, th), scal,
                             sectional_curvature(g, th, CoordinatePlane::PhiTheta),
                             sectional_curvature(g, th, CoordinatePlane::PhiPsi),
                             sectional_curvature(g, th, CoordinatePlane::ThetaPsi)}) + '\n';
        }
        return {text};
    }
    nlohmann::json j{{"xi", xi}, {"s", s}, {"scal", scal}, {"lk", lk_json(lk_so3(g))}, {"points", nlohmann::json::array()}};
    for (double th : thetas) {
        const Christoffel ch = christoffel(g, th);
        const Riemann13 r13 = riemann13(g, th);
        nlohmann::json gamma = nlohmann::json::array();
        for (int k = 0; k < 3; ++k) gamma.push_back(matrix_json(ch.upper[k]));
        nlohmann::json r = nlohmann::json::array();
        for (int m = 0; m < 3; ++m) {
            nlohmann::json rm = nlohmann::json::array();
            for (int i = 0; i < 3; ++i) {
                nlohmann::json ri = nlohmann::json::array();
                for (int jj = 0; jj < 3; ++jj) ri.push_back({r13(m, i, jj, 0), r13(m, i, jj, 1), r13(m, i, jj, 2)});
                rm.push_back(ri);
            }
            r.push_back(rm);
        }
        j["points"].push_back({{"theta", th},
                               {"gram", matrix_json(gram(g, th))},
                               {"gram_inverse", matrix_json(gram_inverse(g, th))},
                               {"volume_element", volume_element(g, th)},
                               {"christoffel", gamma},
                               {"riemann04_pairs", matrix_json(riemann04(g, th))},
                               {"riemann13", r},
                               {"sectional",
                                {{"phi_theta", sectional_curvature(g, th, CoordinatePlane::PhiTheta)},
                                 {"phi_psi", sectional_curvature(g, th, CoordinatePlane::PhiPsi)},
                                 {"theta_psi", sectional_curvature(g, th, CoordinatePlane::ThetaPsi)}}}});
    }
    return {dump(j)};
}

Emitted cmd_efuncs(const std::array<double, 3>& abc, std::uint64_t samples, const Common& c) {
    const Eigentriple t = eigentriple(abc);
    const SphereQuadrature q = e_functions_quadrature(t);
    std::optional<EMonteCarlo> mc;
    if (samples > 0) mc = e_functions_monte_carlo(t, samples, c.seed);
    std::optional<std::pair<double, double>> closed;
    if (abc[0] == abc[1]) closed = {{E1_closed(std::sqrt(abc[0]), std::sqrt(abc[2])), E2_closed(std::sqrt(abc[0]), std::sqrt(abc[2]))}};
    if (c.out == "csv") {
        std::string text = "method,E1,E2,E1_stderr,E2_stderr\n";
        text += "quadrature," + csv_row({q.e1, q.e2, 0.0, 0.0}) + '\n';
        if (closed) text += "closed," + csv_row({closed->first, closed->second, 0.0, 0.0}) + '\n';
        if (mc) text += "monte-carlo," + csv_row({mc->e1, mc->e2, mc->e1_stderr, mc->e2_stderr}) + '\n';
        return {text};
    }
    nlohmann::json j{{"eigentriple", abc},
                     {"quadrature", {{"E1", q.e1}, {"E2", q.e2}, {"residual", q.residual}, {"order", q.order},
                                     {"converged", q.converged}}}};
    j["closed"] = closed ? nlohmann::json{{"E1", closed->first}, {"E2", closed->second}} : nlohmann::json(nullptr);
    if (mc) {
        j["monte_carlo"] = {{"samples", samples}, {"seed", c.seed}, {"E1", mc->e1}, {"E1_stderr", mc->e1_stderr},
                            {"E2", mc->e2}, {"E2_stderr", mc->e2_stderr}};
    }
    return {dump(j)};
}

Emitted cmd_synth(const SpectrumSpec& spec, const Resolution& res, const Common& c) {
    const FieldRealization f(spec, c.seed);
    const EulerGrid grid = build_grid(f, res, false, c.threads);
    if (c.out == "csv") {
        std::string text = "phi,theta,psi,f\n";
        for (int i = 0; i < grid.n_phi(); ++i) {
            for (int jj = 0; jj < grid.n_theta(); ++jj) {
                for (int k = 0; k < grid.n_psi(); ++k) {
                    text += csv_row({grid.phi(i), grid.theta(jj), grid.psi(k), grid.value(grid.id(i, jj, k))}) + '\n';
                }
            }
        }
        return {text};
    }
    nlohmann::json values = nlohmann::json::array();
    for (int i = 0; i < grid.n_phi(); ++i) {
        for (int jj = 0; jj < grid.n_theta(); ++jj) {
            for (int k = 0; k < grid.n_psi(); ++k) values.push_back(grid.value(grid.id(i, jj, k)));
        }
    }
    nlohmann::json j{{"realization", f.to_json()},
                     {"grid", {{"resolution", {res.n_phi, res.n_theta, res.n_psi}}, {"order", "phi,theta,psi"},
                               {"values", values}}}};
    return {dump(j)};
}

Emitted cmd_estimate(const FieldRealization& f, const Resolution& res, const std::vector<double>& us,
                     const EstimatorOptions& opt, const Common& c) {
    const EulerGrid grid = build_grid(f, res, true, c.threads);
    const auto reports = estimate_all(f, grid, us, opt);
    const double xi = std::sqrt(xi_squared(f.spec()));
    if (c.out == "csv") {
        std::string text = "u,L0,L1,L2,L3,L0_gb,L0_morse,EL0,EL1,EL2,EL3,reliable\n";
        for (const auto& r : reports) {
            const LKVector v = r.lk(opt);
            const ExpectedLK e = expected_lk_spin(xi, f.spec().s, r.u);
            text += csv_row({r.u, v.values[0], v.values[1], v.values[2], v.values[3], r.L0_gb}) + ',' +
                    (r.L0_morse ? std::to_string(*r.L0_morse) : std::string()) + ',' +
                    csv_row({e.values[0], e.values[1], e.values[2], e.values[3]}) + ',' + (r.reliable ? "1" : "0") + '\n';
        }
        return {text};
    }
    nlohmann::json j{{"realization", f.to_json()},
                     {"resolution", {res.n_phi, res.n_theta, res.n_psi}},
                     {"l0", to_string(opt.l0)},
                     {"l2", to_string(opt.l2)},
                     {"two_charts", opt.two_charts},
                     {"reports", nlohmann::json::array()}};
    for (const auto& r : reports) {
        nlohmann::json row = to_json(r);
        row["lk"] = lk_json(r.lk(opt).values);
        row["theory"] = lk_json(expected_lk_spin(xi, f.spec().s, r.u).values);
        j["reports"].push_back(row);
    }
    return {dump(j)};
}

// Haar-distributed evaluation points, away from the chart poles.
std::vector<EulerPoint> sample_points(std::uint64_t seed, int n) {
    const Philox gen(derive_seed(seed, 0, 0x70747300U));
    std::vector<EulerPoint> pts;
    for (std::uint32_t i = 0; static_cast<int>(pts.size()) < n; ++i) {
        const auto [a, b] = gen.uniforms({i, 0U, 0U, 0U});
        const auto [u, unused] = gen.uniforms({i, 1U, 0U, 0U});
        (void)unused;
        const double theta = std::acos(1.0 - 2.0 * b);
        if (std::sin(theta) < 1e-3) continue;
        pts.push_back({-pi + 2.0 * pi * a, theta, -pi + 2.0 * pi * u});
    }
    return pts;
}

Emitted cmd_mc_validate(const ExperimentConfig& cfg, const std::string& mode, int points, double z_max,
                        const std::string& manifest_path, bool summary_only, const Common& c, std::ostream& err) {
    if (mode == "metric" || mode == "covariance") {
        if (points < 1) throw ConfigError("--points must be positive");
        const auto pts = sample_points(cfg.master_seed, mode == "metric" ? points : 2 * points);
        nlohmann::json j;
        bool breach = false;
        if (mode == "metric") {
            const MetricReport r = validate_metric(cfg.spec, pts, cfg.trials, cfg.master_seed, cfg.threads);
            j = to_json(r);
            breach = !(r.max_abs_z <= z_max);
        } else {
            std::vector<std::pair<EulerPoint, EulerPoint>> pairs;
            for (int i = 0; i < points; ++i) pairs.push_back({pts[2 * i], pts[2 * i + 1]});
            pairs.push_back({pts[0], pts[0]});
            const CovarianceReport r = validate_covariance(cfg.spec, pairs, cfg.trials, cfg.master_seed, cfg.threads);
            j = to_json(r);
            breach = !(r.max_abs_z <= z_max) || !(r.spin_residual <= 1e-10);
        }
        j["z_max"] = z_max;
        j["breach"] = breach;
        if (breach) err << "field-law check breached: max |z| above " << z_max << " or spin residual above 1e-10\n";
        if (c.out == "csv") {
            std::string text = "index,mean,stderr,theory,z\n";
            const auto& rows = mode == "metric" ? j.at("entries") : j.at("pairs");
            for (std::size_t i = 0; i < rows.size(); ++i) {
                auto num = [&](const char* k) { return rows[i][k].is_null() ? std::nan("") : rows[i][k].get<double>(); };
                text += std::to_string(i) + ',' + csv_row({num("mean"), num("stderr"), num("theory"), num("z")}) + '\n';
            }
            return {text, breach ? kExitBreach : kExitOk};
        }
        return {dump(j), breach ? kExitBreach : kExitOk};
    }

    const ExperimentResult r = run_experiment(cfg);
    if (!manifest_path.empty()) {
        std::ofstream m(manifest_path);
        if (!m) throw ConfigError("cannot write manifest " + manifest_path);
        m << dump(manifest(r, c.timing));
    }
    const std::vector<Breach> breaches = check_tolerances(r);
    for (const auto& b : breaches) {
        err << "tolerance breach: u = " << format_double(b.u) << " L" << b.index << " mean " << format_double(b.stat.mean)
            << " theory " << format_double(b.stat.theory) << " z " << format_double(b.stat.z) << '\n';
    }
    if (r.excessive_exclusion()) err << "more than 5% of trials excluded at some threshold\n";
    const int code = breaches.empty() && !r.excessive_exclusion() ? kExitOk : kExitBreach;
    if (c.out == "csv") {
        std::ostringstream text;
        write_csv(r, text);
        return {text.str(), code};
    }
    return {dump(to_json(r, !summary_only)), code};
}

Emitted cmd_d1(const D1Config& cfg, const Common& c) {
    const D1Verdict v = discriminate_d1(cfg);
    if (c.out == "csv") {
        std::string text = "u,x,mean,stderr,theory_integral,theory_printed\n";
        for (std::size_t k = 0; k < v.u.size(); ++k) {
            text += csv_row({v.u[k], v.x[k], v.boundary[k].mean, v.boundary[k].se, v.candidates[0].prefactor * v.x[k],
                             v.candidates[1].prefactor * v.x[k]}) + '\n';
        }
        return {text};
    }
    return {dump(to_json(v))};
}

} // namespace

std::vector<double> parse_range(const std::string& text) {
    if (text.empty()) throw ConfigError("empty range");
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw ConfigError("range must be start:stop:step: '" + text + "'");
        const double a = parse_number(parts[0]), b = parse_number(parts[1]), step = parse_number(parts[2]);
        if (step == 0.0) throw ConfigError("range step must be nonzero");
        if ((b - a) * step < 0.0) throw ConfigError("range step points away from stop: '" + text + "'");
        const double span = (b - a) / step;
        if (span > static_cast<double>(kMaxRangeSize)) throw ConfigError("range too long: '" + text + "'");
        std::vector<double> out;
        for (std::size_t k = 0;; ++k) {
            const double x = a + static_cast<double>(k) * step;
            if ((step > 0.0 && x > b + kRangeSlack) || (step < 0.0 && x < b - kRangeSlack)) break;
            out.push_back(x);
        }
        return out;
    }
    std::vector<double> out;
    for (const auto& p : split(text, ',')) out.push_back(parse_number(p));
    return out;
}

Resolution parse_resolution(const std::string& text) {
    const auto parts = split(text, 'x');
    if (parts.size() != 1 && parts.size() != 3) throw ConfigError("resolution must be N or AxBxC: '" + text + "'");
    std::array<int, 3> n{};
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string& p = parts[parts.size() == 1 ? 0 : i];
        std::size_t used = 0;
        try {
            n[i] = std::stoi(p, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != p.size() || n[i] < 8) throw ConfigError("resolution axes must be integers >= 8: '" + text + "'");
    }
    return {n[0], n[1], n[2]};
}

SpectrumSpec load_spectrum(const std::string& name) {
    if (name == "reference") return reference_spectrum();
    if (name == "d1-reference") return d1_reference_spectrum();
    std::ifstream in(name);
    if (!in) throw ConfigError("cannot read spectrum file " + name);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed spectrum file: ") + e.what());
    }
    return normalize(spectrum_from_json(j));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaussian spin fields on SO(3): expected and empirical Lipschitz-Killing curvatures", "lkspin"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1, 1);

    const int env_threads = default_threads();
    Common common;
    common.threads = env_threads;

    double xi = 0.0, s = 0.0, volume = 1.0;
    std::string u_text = "0", theta_text = "1.5707963267948966", manifold = "so3";
    std::array<double, 3> abc{1.0, 1.0, 1.0};
    std::uint64_t samples = 0;
    std::string spectrum = "reference", resolution_text, field_path, l0 = "morse", l2 = "mesh", config_path;
    std::string mode = "lk", manifest_path;
    bool one_chart = false, summary_only = false;
    int trials = 0, points = 5;
    double z_max = 4.0;

    auto* expect = app.add_subcommand("expect", "Closed-form expected LK curvatures over a threshold grid");
    expect->add_option("--xi", xi, "Eigenvalue parameter xi")->required();
    expect->add_option("--s", s, "Spin weight")->required();
    expect->add_option("--u", u_text, "Thresholds: start:stop:step, list or value")->capture_default_str();
    expect->add_option("--manifold", manifold, "so3 or su2")->check(CLI::IsMember({"so3", "su2"}))->capture_default_str();

    auto* euclid = app.add_subcommand("euclidean", "Flat-space expectations and the gamma constants");
    euclid->add_option("--a", abc[0], "First eigenvalue")->required();
    euclid->add_option("--b", abc[1], "Second eigenvalue")->required();
    euclid->add_option("--c", abc[2], "Third eigenvalue")->required();
    euclid->add_option("--u", u_text, "Thresholds")->capture_default_str();
    euclid->add_option("--volume", volume, "Domain volume")->capture_default_str();

    auto* geometry = app.add_subcommand("geometry", "Metric, connection and curvature tensors of g_{xi,s}");
    geometry->add_option("--xi", xi, "Eigenvalue parameter xi")->required();
    geometry->add_option("--s", s, "Spin weight")->required();
    geometry->add_option("--theta", theta_text, "Polar Euler angles: start:stop:step, list or value")
        ->capture_default_str();

    auto* efuncs = app.add_subcommand("e-funcs", "E1 and E2 of an eigentriple");
    efuncs->add_option("--a", abc[0], "First eigenvalue")->required();
    efuncs->add_option("--b", abc[1], "Second eigenvalue")->required();
    efuncs->add_option("--c", abc[2], "Third eigenvalue")->required();
    efuncs->add_option("--mc-samples", samples, "Also run a Monte Carlo with this many samples")->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Sample a field realization and its grid values");
    synth->add_option("--spectrum", spectrum, "reference, d1-reference or a spectrum JSON file")->capture_default_str();
    synth->add_option("--resolution", resolution_text, "N or AxBxC (default 16)");

    auto* estimate = app.add_subcommand("estimate", "Empirical LK curvatures of one realization");
    estimate->add_option("--spectrum", spectrum, "reference, d1-reference or a spectrum JSON file")->capture_default_str();
    estimate->add_option("--field", field_path, "Realization JSON from synth (overrides --spectrum and --seed)");
    estimate->add_option("--resolution", resolution_text, "N or AxBxC (default 64)");
    estimate->add_option("--u", u_text, "Thresholds")->capture_default_str();
    estimate->add_option("--l0", l0, "gauss-bonnet or morse")->check(CLI::IsMember({"gauss-bonnet", "morse"}))
        ->capture_default_str();
    estimate->add_option("--l2", l2, "mesh or crossings")->check(CLI::IsMember({"mesh", "crossings"}))
        ->capture_default_str();
    estimate->add_flag("--one-chart", one_chart, "Integrate surfaces in the Euler chart only");

    auto* mcv = app.add_subcommand("mc-validate", "Monte Carlo comparison with the closed forms");
    mcv->add_option("--config", config_path, "Experiment JSON; flags below are then ignored except --threads");
    mcv->add_option("--mode", mode, "lk, metric or covariance")->check(CLI::IsMember({"lk", "metric", "covariance"}))
        ->capture_default_str();
    mcv->add_option("--spectrum", spectrum, "reference, d1-reference or a spectrum JSON file")->capture_default_str();
    mcv->add_option("--trials", trials, "Number of realizations (default 100)")->check(CLI::PositiveNumber);
    mcv->add_option("--resolution", resolution_text, "N or AxBxC (default 64)");
    mcv->add_option("--u", u_text, "Thresholds")->capture_default_str();
    mcv->add_option("--l0", l0, "gauss-bonnet or morse")->check(CLI::IsMember({"gauss-bonnet", "morse"}))
        ->capture_default_str();
    mcv->add_option("--l2", l2, "mesh or crossings")->check(CLI::IsMember({"mesh", "crossings"}))->capture_default_str();
    mcv->add_flag("--one-chart", one_chart, "Integrate surfaces in the Euler chart only");
    mcv->add_option("--points", points, "Evaluation points (metric) or pairs (covariance)")->capture_default_str();
    mcv->add_option("--z-max", z_max, "Largest accepted |z| in metric and covariance modes")->capture_default_str();
    mcv->add_option("--manifest", manifest_path, "Write the run manifest to this file");
    mcv->add_flag("--summary-only", summary_only, "Leave per-trial reports out of the JSON");

    auto* d1 = app.add_subcommand("d1-test", "Which EL1 prefactor the mesh estimates follow");
    auto* d1_spectrum = d1->add_option("--spectrum", spectrum, "reference, d1-reference or a spectrum JSON file (default d1-reference)");
    d1->add_option("--trials", trials, "Number of realizations (default 10)")->check(CLI::PositiveNumber);
    d1->add_option("--resolution", resolution_text, "N or AxBxC (default 48)");
    auto* d1_u = d1->add_option("--u", u_text, "Nonzero thresholds (default 0.25:0.75:0.25)");

    for (auto* cmd : {expect, euclid, geometry, efuncs, synth, estimate, mcv, d1}) add_common(cmd, common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto parsed = app.get_subcommands();
        out << (parsed.empty() ? app.help() : parsed.front()->help());
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        const auto parsed = app.get_subcommands();
        err << "error: " << e.what() << "\n\n" << (parsed.empty() ? app.help() : parsed.front()->help());
        return kExitError;
    }

    const auto start = std::chrono::steady_clock::now();
    Emitted result;
    try {
        if (expect->parsed()) {
            result = cmd_expect(xi, s, parse_range(u_text), manifold, common);
        } else if (euclid->parsed()) {
            result = cmd_euclidean(abc, parse_range(u_text), volume, common);
        } else if (geometry->parsed()) {
            result = cmd_geometry(xi, s, parse_range(theta_text), common);
        } else if (efuncs->parsed()) {
            result = cmd_efuncs(abc, samples, common);
        } else if (synth->parsed()) {
            const Resolution res = resolution_text.empty() ? Resolution::cube(16) : parse_resolution(resolution_text);
            result = cmd_synth(load_spectrum(spectrum), res, common);
        } else if (estimate->parsed()) {
            const Resolution res = resolution_text.empty() ? Resolution::cube(64) : parse_resolution(resolution_text);
            const std::vector<double> us = parse_range(u_text);
            const EstimatorOptions opt{l0_method_from_string(l0), l2_method_from_string(l2), true, !one_chart,
                                       common.threads};
            std::optional<FieldRealization> field;
            if (!field_path.empty()) {
                std::ifstream in(field_path);
                if (!in) throw ConfigError("cannot read field file " + field_path);
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(in);
                } catch (const nlohmann::json::exception& e) {
                    throw ConfigError(std::string("malformed field file: ") + e.what());
                }
                field.emplace(realization_from_json(j.contains("realization") ? j.at("realization") : j));
            } else {
                field.emplace(load_spectrum(spectrum), common.seed);
            }
            result = cmd_estimate(*field, res, us, opt, common);
        } else if (mcv->parsed()) {
            ExperimentConfig cfg;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw ConfigError("cannot read config file " + config_path);
                try {
                    cfg = experiment_config_from_json(nlohmann::json::parse(in));
                    cfg.spec = normalize(cfg.spec);
                } catch (const nlohmann::json::exception& e) {
                    throw ConfigError(std::string("malformed config file: ") + e.what());
                }
            } else {
                cfg.spec = load_spectrum(spectrum);
                cfg.resolution = resolution_text.empty() ? Resolution::cube(64) : parse_resolution(resolution_text);
                cfg.thresholds = parse_range(u_text);
                cfg.trials = trials > 0 ? trials : 100;
                cfg.master_seed = common.seed;
                cfg.l0 = l0_method_from_string(l0);
                cfg.l2 = l2_method_from_string(l2);
                cfg.two_charts = !one_chart;
            }
            cfg.threads = common.threads;
            if (mode == "lk") validate(cfg);
            result = cmd_mc_validate(cfg, mode, points, z_max, manifest_path, summary_only, common, err);
        } else if (d1->parsed()) {
            D1Config cfg;
            cfg.spec = load_spectrum(d1_spectrum->count() > 0 ? spectrum : "d1-reference");
            if (trials > 0) cfg.trials = trials;
            if (!resolution_text.empty()) cfg.resolution = parse_resolution(resolution_text);
            if (d1_u->count() > 0) cfg.u_grid = parse_range(u_text);
            cfg.seed = common.seed;
            cfg.threads = common.threads;
            result = cmd_d1(cfg, common);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    if (common.output.empty()) {
        out << result.text;
    } else {
        std::ofstream f(common.output, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << common.output << '\n';
            return kExitError;
        }
        f << result.text;
    }
    if (common.timing) {
        err << "wall_seconds " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
            << '\n';
    }
    return result.code;
}

} // namespace lkspin
