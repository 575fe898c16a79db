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

#include "lkspin/mc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "lkspin/errors.hpp"
#include "lkspin/expectations.hpp"
#include "lkspin/format.hpp"
#include "lkspin/parallel.hpp"
#include "lkspin/rng.hpp"
#include "lkspin/version.hpp"

namespace lkspin {

namespace {

constexpr double pi = std::numbers::pi;

// Stream tags for derive_seed.
constexpr std::uint32_t kTagTrial = 1;
constexpr std::uint32_t kTagMetric = 2;
constexpr std::uint32_t kTagCovariance = 3;
constexpr std::uint32_t kTagD1 = 4;

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

nlohmann::json to_json(const LKStatistic& s) {
    return {{"mean", number_or_null(s.mean)}, {"stderr", number_or_null(s.se)}, {"theory", number_or_null(s.theory)},
            {"z", number_or_null(s.z)}};
}

nlohmann::json to_json(const EulerPoint& p) { return {p.phi, p.theta, p.psi}; }

} // namespace

void validate(const ExperimentConfig& cfg) {
    validate(cfg.spec);
    if (!is_normalized(cfg.spec, 1e-9)) throw ConfigError("experiment spectrum must be normalized");
    if (cfg.trials < 2) throw ConfigError("an experiment needs at least 2 trials");
    if (cfg.thresholds.empty()) throw ConfigError("an experiment needs at least one threshold");
    for (double u : cfg.thresholds) {
        if (!std::isfinite(u)) throw ConfigError("thresholds must be finite");
    }
    const Resolution& r = cfg.resolution;
    if (r.n_phi < 8 || r.n_theta < 8 || r.n_psi < 8) throw ConfigError("resolution needs at least 8 nodes per axis");
    if (cfg.threads < 1) throw ConfigError("threads must be positive");
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    return {{"spec", to_json(cfg.spec)},
            {"resolution", {cfg.resolution.n_phi, cfg.resolution.n_theta, cfg.resolution.n_psi}},
            {"thresholds", cfg.thresholds},
            {"trials", cfg.trials},
            {"master_seed", cfg.master_seed},
            {"l0", to_string(cfg.l0)},
            {"l2", to_string(cfg.l2)},
            {"two_charts", cfg.two_charts}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig cfg;
        cfg.spec = spectrum_from_json(j.at("spec"));
        if (j.contains("resolution")) {
            const auto& r = j.at("resolution");
            if (r.is_number_integer()) {
                cfg.resolution = Resolution::cube(r.get<int>());
            } else {
                if (!r.is_array() || r.size() != 3) throw ConfigError("resolution must be an integer or three integers");
                cfg.resolution = {r[0].get<int>(), r[1].get<int>(), r[2].get<int>()};
            }
        }
        if (j.contains("thresholds")) cfg.thresholds = j.at("thresholds").get<std::vector<double>>();
        if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
        if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("l0")) cfg.l0 = l0_method_from_string(j.at("l0").get<std::string>());
        if (j.contains("l2")) cfg.l2 = l2_method_from_string(j.at("l2").get<std::string>());
        if (j.contains("two_charts")) cfg.two_charts = j.at("two_charts").get<bool>();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed experiment config: ") + e.what());
    }
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json(cfg).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) { return derive_seed(master, trial, kTagTrial); }

LKStatistic sample_statistic(const std::vector<double>& v, double theory) {
    LKStatistic s;
    s.theory = theory;
    if (v.empty()) {
        s.mean = s.se = s.z = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.se = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))
                        : std::numeric_limits<double>::quiet_NaN();
    s.z = s.se > 0.0 ? (s.mean - theory) / s.se : std::numeric_limits<double>::quiet_NaN();
    return s;
}

bool ExperimentResult::excessive_exclusion() const {
    for (const auto& t : thresholds) {
        if (t.exclusion_rate() > kMaxExclusionRate) return true;
    }
    return false;
}

std::vector<ThresholdSummary> summarize(const ExperimentConfig& cfg, const std::vector<TrialRecord>& trials) {
    const EstimatorOptions opt{cfg.l0, cfg.l2, true, cfg.two_charts, 1};
    const double xi = std::sqrt(xi_squared(cfg.spec));
    const double s = cfg.spec.s;
    std::vector<ThresholdSummary> out;
    for (std::size_t k = 0; k < cfg.thresholds.size(); ++k) {
        ThresholdSummary ts;
        ts.u = cfg.thresholds[k];
        const ExpectedLK theory = expected_lk_spin(xi, s, ts.u);
        std::array<std::vector<double>, 4> values;
        std::vector<double> alternate;
        bool have_alternate = true;
        for (const auto& t : trials) {
            const EstimatorReport& r = t.reports.at(k);
            if (!r.reliable) {
                ++ts.excluded;
                continue;
            }
            ++ts.used;
            const LKVector v = r.lk(opt);
            for (int j = 0; j < 4; ++j) values[j].push_back(v.values[j]);
            if (cfg.l0 == L0Method::Morse) {
                alternate.push_back(r.L0_gb);
            } else if (r.L0_morse) {
                alternate.push_back(*r.L0_morse);
            } else {
                have_alternate = false;
            }
        }
        for (int j = 0; j < 4; ++j) ts.lk[j] = sample_statistic(values[j], theory.values[j]);
        if (have_alternate && !alternate.empty()) ts.l0_alternate = sample_statistic(alternate, theory.values[0]);
        out.push_back(ts);
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult res;
    res.config = cfg;
    res.config_hash = config_hash(cfg);
    res.code_version = kVersion;
    res.trials.resize(static_cast<std::size_t>(cfg.trials));
    const EstimatorOptions opt{cfg.l0, cfg.l2, true, cfg.two_charts, 1};
    parallel_for(res.trials.size(), cfg.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
            TrialRecord& rec = res.trials[t];
            rec.trial = static_cast<int>(t);
            rec.seed = trial_seed(cfg.master_seed, t);
            const FieldRealization f(cfg.spec, rec.seed);
            const EulerGrid grid = build_grid(f, cfg.resolution, true, 1);
            rec.reports = estimate_all(f, grid, cfg.thresholds, opt);
        }
    });
    res.thresholds = summarize(cfg, res.trials);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

nlohmann::json to_json(const ExperimentResult& r, bool include_trials) {
    nlohmann::json j;
    j["config"] = to_json(r.config);
    j["config_hash"] = hash_hex(r.config_hash);
    j["code_version"] = r.code_version;
    j["excessive_exclusion"] = r.excessive_exclusion();
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& t : r.thresholds) {
        nlohmann::json row{{"u", t.u}, {"used", t.used}, {"excluded", t.excluded}, {"exclusion_rate", t.exclusion_rate()}};
        for (int k = 0; k < 4; ++k) row["L" + std::to_string(k)] = to_json(t.lk[k]);
        if (t.l0_alternate) row["L0_alternate"] = to_json(*t.l0_alternate);
        summary.push_back(row);
    }
    j["summary"] = summary;
    if (include_trials) {
        nlohmann::json trials = nlohmann::json::array();
        for (const auto& t : r.trials) {
            nlohmann::json reports = nlohmann::json::array();
            for (const auto& rep : t.reports) reports.push_back(to_json(rep));
            trials.push_back({{"trial", t.trial}, {"seed", t.seed}, {"reports", reports}});
        }
        j["trials"] = trials;
    }
    return j;
}

void write_csv(const ExperimentResult& r, std::ostream& out) {
    out << "u,L,mean,stderr,theory,z\n";
    for (const auto& t : r.thresholds) {
        for (int k = 0; k < 4; ++k) {
            const LKStatistic& s = t.lk[k];
            out << format_double(t.u) << ",L" << k << ',' << format_double(s.mean) << ',' << format_double(s.se) << ','
                << format_double(s.theory) << ',' << format_double(s.z) << '\n';
        }
    }
}

nlohmann::json manifest(const ExperimentResult& r, bool timing) {
    nlohmann::json j{{"config_hash", hash_hex(r.config_hash)},
                     {"master_seed", r.config.master_seed},
                     {"code_version", r.code_version},
                     {"config", to_json(r.config)}};
    if (timing) j["timing"] = {{"wall_seconds", r.wall_seconds}, {"threads", r.config.threads}};
    return j;
}

bool within_tolerance(const LKStatistic& s, const Tolerance& t) {
    if (!std::isfinite(s.mean)) return false;
    const double allowed = std::max(t.rel * std::abs(s.theory), std::isfinite(s.se) ? t.k * s.se : 0.0);
    return std::abs(s.mean - s.theory) <= allowed;
}

std::vector<Breach> check_tolerances(const ExperimentResult& r, const std::array<Tolerance, 4>& tol) {
    std::vector<Breach> out;
    for (const auto& t : r.thresholds) {
        for (int k = 0; k < 4; ++k) {
            if (!within_tolerance(t.lk[k], tol[k])) out.push_back({t.u, k, t.lk[k]});
        }
    }
    return out;
}

MetricReport validate_metric(const SpectrumSpec& spec, const std::vector<EulerPoint>& points, int trials,
                             std::uint64_t seed, int threads) {
    if (trials < 2) throw ConfigError("metric validation needs at least 2 trials");
    const LeftInvariantMetric g = induced_metric(spec);
    const std::size_t np = points.size();
    // six products d_i f d_j f (i <= j) per point and trial
    std::vector<double> prod(static_cast<std::size_t>(trials) * np * 6);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
            const FieldRealization f(spec, derive_seed(seed, t, kTagMetric));
            for (std::size_t p = 0; p < np; ++p) {
                const Vec3 d = f.jet(points[p]).gradient;
                int slot = 0;
                for (int i = 0; i < 3; ++i) {
                    for (int j = i; j < 3; ++j) prod[(t * np + p) * 6 + slot++] = d(i) * d(j);
                }
            }
        }
    });
    MetricReport r;
    r.trials = trials;
    std::vector<double> v(static_cast<std::size_t>(trials));
    for (std::size_t p = 0; p < np; ++p) {
        const Mat3 sigma = gram(g, points[p].theta);
        int slot = 0;
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j, ++slot) {
                for (std::size_t t = 0; t < v.size(); ++t) v[t] = prod[(t * np + p) * 6 + slot];
                EntryCheck c{static_cast<int>(p), i, j, sample_statistic(v, sigma(i, j))};
                r.max_abs_z = std::max(r.max_abs_z, std::abs(c.stat.z));
                r.entries.push_back(c);
            }
        }
    }
    return r;
}

CovarianceReport validate_covariance(const SpectrumSpec& spec, const std::vector<std::pair<EulerPoint, EulerPoint>>& pairs,
                                     int trials, std::uint64_t seed, int threads) {
    if (trials < 2) throw ConfigError("covariance validation needs at least 2 trials");
    const std::size_t np = pairs.size();
    const double psis[] = {0.37, 1.9, -2.6};
    std::vector<double> prod(static_cast<std::size_t>(trials) * np);
    std::vector<double> residual(static_cast<std::size_t>(trials), 0.0);
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
            const FieldRealization f(spec, derive_seed(seed, t, kTagCovariance));
            for (std::size_t k = 0; k < np; ++k) {
                const auto& [p, q] = pairs[k];
                prod[t * np + k] = f.evaluate(p) * f.evaluate(q);
                const std::complex<double> x = f.evaluate_complex(p);
                for (double psi : psis) {
                    const EulerPoint moved = from_rotation(to_rotation(p) * rotation_z(psi));
                    const std::complex<double> expect = x * std::polar(1.0, -spec.s * psi);
                    residual[t] = std::max(residual[t], std::abs(f.evaluate_complex(moved) - expect));
                }
            }
        }
    });
    CovarianceReport r;
    r.trials = trials;
    std::vector<double> v(static_cast<std::size_t>(trials));
    for (std::size_t k = 0; k < np; ++k) {
        const auto& [p, q] = pairs[k];
        for (std::size_t t = 0; t < v.size(); ++t) v[t] = prod[t * np + k];
        PairCheck c{p, q, sample_statistic(v, covariance(spec, relative_rotation(p, q)))};
        r.max_abs_z = std::max(r.max_abs_z, std::abs(c.stat.z));
        r.pairs.push_back(c);
    }
    for (double x : residual) r.spin_residual = std::max(r.spin_residual, x);
    return r;
}

nlohmann::json to_json(const MetricReport& r) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries) {
        nlohmann::json row = to_json(e.stat);
        row["point"] = e.point;
        row["i"] = e.i;
        row["j"] = e.j;
        entries.push_back(row);
    }
    return {{"trials", r.trials}, {"entries", entries}, {"max_abs_z", r.max_abs_z}};
}

nlohmann::json to_json(const CovarianceReport& r) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& c : r.pairs) {
        nlohmann::json row = to_json(c.stat);
        row["p"] = to_json(c.p);
        row["q"] = to_json(c.q);
        pairs.push_back(row);
    }
    return {{"trials", r.trials}, {"pairs", pairs}, {"max_abs_z", r.max_abs_z}, {"spin_residual", r.spin_residual}};
}

D1Verdict discriminate_d1(const D1Config& cfg) {
    validate(cfg.spec);
    if (!is_normalized(cfg.spec, 1e-9)) throw ConfigError("d1 spectrum must be normalized");
    if (cfg.trials < 2) throw ConfigError("d1 discrimination needs at least 2 trials");
    if (cfg.u_grid.empty()) throw ConfigError("d1 discrimination needs thresholds");
    const double xi = std::sqrt(xi_squared(cfg.spec));
    const double s = cfg.spec.s;
    if (xi < 2.0 * std::abs(s)) throw DomainError("d1 discrimination needs xi >= 2|s|");
    for (double u : cfg.u_grid) {
        if (!std::isfinite(u) || u == 0.0) throw DomainError("d1 thresholds must be finite and nonzero");
    }
    D1Verdict v;
    v.trials = cfg.trials;
    v.u = cfg.u_grid;
    const double bracket = 8.0 * pi * pi * (2.0 * xi * xi + s * s - E1_closed(xi, s));
    double xx = 0.0;
    for (double u : cfg.u_grid) {
        v.x.push_back(u * std::exp(-0.5 * u * u) * bracket);
        xx += v.x.back() * v.x.back();
    }
    const std::size_t nu = cfg.u_grid.size();
    std::vector<double> b(static_cast<std::size_t>(cfg.trials) * nu);
    std::vector<char> ok(static_cast<std::size_t>(cfg.trials), 1);
    const EstimatorOptions opt{L0Method::GaussBonnet, L2Method::Mesh, false, true, 1};
    parallel_for(static_cast<std::size_t>(cfg.trials), cfg.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t t = lo; t < hi; ++t) {
            const FieldRealization f(cfg.spec, derive_seed(cfg.seed, t, kTagD1));
            const EulerGrid grid = build_grid(f, cfg.resolution, true, 1);
            const auto reports = estimate_all(f, grid, cfg.u_grid, opt);
            for (std::size_t k = 0; k < nu; ++k) {
                b[t * nu + k] = reports[k].L1_boundary;
                if (!reports[k].reliable) ok[t] = 0;
            }
        }
    });
    const double pipeline = 1.0 / std::sqrt(8.0 * pi * pi * pi), printed = 1.0 / std::sqrt(8.0 * pi * pi);
    std::vector<double> slopes;
    std::vector<std::vector<double>> per_u(nu);
    for (std::size_t t = 0; t < ok.size(); ++t) {
        if (!ok[t]) {
            ++v.excluded;
            continue;
        }
        double xb = 0.0;
        for (std::size_t k = 0; k < nu; ++k) {
            xb += v.x[k] * b[t * nu + k];
            per_u[k].push_back(b[t * nu + k]);
        }
        slopes.push_back(xb / xx);
    }
    for (std::size_t k = 0; k < nu; ++k) v.boundary.push_back(sample_statistic(per_u[k], pipeline * v.x[k]));
    const LKStatistic slope = sample_statistic(slopes, pipeline);
    v.slope = slope.mean;
    v.slope_se = slope.se;
    auto candidate = [&](const char* name, double c) {
        D1Candidate d{name, c, (v.slope - c) / v.slope_se, false};
        d.within = std::abs(d.z) <= 3.0;
        return d;
    };
    v.candidates = {candidate("1/sqrt(8 pi^3)", pipeline), candidate("1/sqrt(8 pi^2)", printed)};
    v.power = std::abs(printed - pipeline) / v.slope_se;
    if (v.candidates[0].within != v.candidates[1].within)
        v.verdict = v.candidates[0].within ? v.candidates[0].name : v.candidates[1].name;
    else
        v.verdict = "inconclusive";
    return v;
}

nlohmann::json to_json(const D1Verdict& v) {
    nlohmann::json boundary = nlohmann::json::array();
    for (std::size_t k = 0; k < v.u.size(); ++k) {
        nlohmann::json row = to_json(v.boundary[k]);
        row["u"] = v.u[k];
        row["x"] = v.x[k];
        boundary.push_back(row);
    }
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : v.candidates)
        cands.push_back({{"name", c.name}, {"prefactor", c.prefactor}, {"z", number_or_null(c.z)}, {"within_3sigma", c.within}});
    return {{"trials", v.trials},       {"excluded", v.excluded},
            {"boundary", boundary},     {"slope", number_or_null(v.slope)},
            {"slope_stderr", number_or_null(v.slope_se)}, {"candidates", cands},
            {"power_sigma", number_or_null(v.power)},     {"verdict", v.verdict}};
}

SpectrumSpec d1_reference_spectrum() {
    // c_l^2 / 2 = 3/14 and 11/14: xi^2 = (3 * 89 + 11 * 103) / 14 = 100
    SpectrumSpec spec;
    spec.s = 2;
    spec.coeffs[13] = std::sqrt(2.0 * 3.0 / 14.0);
    spec.coeffs[14] = std::sqrt(2.0 * 11.0 / 14.0);
    return spec;
}

SpectrumSpec reference_spectrum() {
    SpectrumSpec spec;
    spec.s = 2;
    for (int l = 2; l <= 8; ++l) spec.coeffs[l] = 1.0 / ((1.0 + l) * (1.0 + l));
    return normalize(spec);
}

} // namespace lkspin
