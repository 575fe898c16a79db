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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lkspin/estimators.hpp"
#include "lkspin/grid.hpp"
#include "lkspin/spinfield.hpp"

namespace lkspin {

struct ExperimentConfig {
    SpectrumSpec spec;
    Resolution resolution = Resolution::cube(64);
    std::vector<double> thresholds{0.0};
    int trials = 100;
    std::uint64_t master_seed = 1;
    L0Method l0 = L0Method::Morse;
    L2Method l2 = L2Method::Mesh;
    bool two_charts = true;
    int threads = 1; // workers; results do not depend on it and it is not part of the hash
};

// Throws ConfigError unless trials >= 2, thresholds are finite and non-empty and
// every axis has at least 8 nodes; the spectrum must be valid and normalized.
void validate(const ExperimentConfig& cfg);

// Canonical form without the worker count. Sorted keys, so dump() is stable.
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

// FNV-1a 64 of the canonical JSON dump, and its 16-digit hex form.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hash_hex(std::uint64_t h);

// Per-trial field seed: derive_seed(master, trial).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

struct LKStatistic {
    double mean = 0.0;
    double se = 0.0; // sample standard deviation / sqrt(n)
    double theory = 0.0;
    double z = 0.0;  // (mean - theory) / se; NaN when se = 0
};

struct ThresholdSummary {
    double u = 0.0;
    std::array<LKStatistic, 4> lk{};
    std::optional<LKStatistic> l0_alternate; // the L0 method not selected, when available
    int used = 0;
    int excluded = 0;
    double exclusion_rate() const { return used + excluded > 0 ? double(excluded) / (used + excluded) : 0.0; }
};

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    std::vector<EstimatorReport> reports; // one per threshold
};

// Fraction of excluded trials at any threshold above which an experiment fails.
inline constexpr double kMaxExclusionRate = 0.05;

struct ExperimentResult {
    ExperimentConfig config;
    std::uint64_t config_hash = 0;
    std::string code_version;
    double wall_seconds = 0.0;
    std::vector<ThresholdSummary> thresholds;
    std::vector<TrialRecord> trials;

    bool excessive_exclusion() const;
};

// Runs cfg.trials independent realizations in parallel and compares the sample
// means with expected_lk_spin. Trials flagged unreliable at a threshold are left
// out of that threshold's statistics and counted.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Summary statistics of trial records (used by run_experiment).
std::vector<ThresholdSummary> summarize(const ExperimentConfig& cfg, const std::vector<TrialRecord>& trials);

// Full result; wall time is left out so identical runs give identical bytes.
nlohmann::json to_json(const ExperimentResult& r, bool include_trials = true);
// Rows u, L, mean, stderr, theory, z with a header line.
void write_csv(const ExperimentResult& r, std::ostream& out);
// Config hash, seed, code version and config; wall time only when timing is set.
nlohmann::json manifest(const ExperimentResult& r, bool timing = false);

// Acceptance tolerance for one LK index: |mean - theory| <= max(rel |theory|, k se).
struct Tolerance {
    double rel = 0.0;
    double k = 3.0;
};
inline constexpr std::array<Tolerance, 4> kMonteCarloTolerances{{{0.10, 3.0}, {0.10, 3.0}, {0.05, 3.0}, {0.0, 3.0}}};

struct Breach {
    double u = 0.0;
    int index = 0;
    LKStatistic stat;
};
std::vector<Breach> check_tolerances(const ExperimentResult& r,
                                     const std::array<Tolerance, 4>& tol = kMonteCarloTolerances);
bool within_tolerance(const LKStatistic& s, const Tolerance& t);

// Sample mean of a vector and its standard error.
LKStatistic sample_statistic(const std::vector<double>& v, double theory);

// Field-law checks against the closed forms, one seed per trial.
struct EntryCheck {
    int point = 0;
    int i = 0;
    int j = 0;
    LKStatistic stat;
};

struct MetricReport {
    int trials = 0;
    std::vector<EntryCheck> entries; // E[d_i f d_j f] vs gram(induced_metric(spec), theta), i <= j
    double max_abs_z = 0.0;
};

MetricReport validate_metric(const SpectrumSpec& spec, const std::vector<EulerPoint>& points, int trials,
                             std::uint64_t seed, int threads = 1);

struct PairCheck {
    EulerPoint p;
    EulerPoint q;
    LKStatistic stat; // E[f(p) f(q)] vs covariance(spec, p^{-1} q)
};

struct CovarianceReport {
    int trials = 0;
    std::vector<PairCheck> pairs;
    double max_abs_z = 0.0;
    // max |X(p R3(psi)) - X(p) e^{-i s psi}| with p R3(psi) formed as a rotation matrix
    double spin_residual = 0.0;
};

CovarianceReport validate_covariance(const SpectrumSpec& spec, const std::vector<std::pair<EulerPoint, EulerPoint>>& pairs,
                                     int trials, std::uint64_t seed, int threads = 1);

nlohmann::json to_json(const MetricReport& r);
nlohmann::json to_json(const CovarianceReport& r);

// Which prefactor of the u-odd part of EL1 the mesh estimates follow. Per trial
// the L1 boundary term b(u) = -(1/pi) int H is fitted as c x(u) with
// x(u) = u e^{-u^2/2} 8 pi^2 (2 xi^2 + s^2 - E1(xi, s)); the mean of the per-trial
// slopes is compared with 1/sqrt(8 pi^3) and 1/sqrt(8 pi^2).
struct D1Config {
    SpectrumSpec spec;
    std::vector<double> u_grid{0.25, 0.5, 0.75};
    int trials = 10;
    Resolution resolution = Resolution::cube(48);
    std::uint64_t seed = 1;
    int threads = 1;
};

struct D1Candidate {
    std::string name;
    double prefactor = 0.0;
    double z = 0.0;
    bool within = false; // |z| <= 3
};

struct D1Verdict {
    int trials = 0;
    int excluded = 0;
    std::vector<double> u;
    std::vector<double> x;
    std::vector<LKStatistic> boundary; // per u, theory with the integral-formula prefactor
    double slope = 0.0;
    double slope_se = 0.0;
    std::array<D1Candidate, 2> candidates; // integral-formula, printed
    double power = 0.0; // candidate separation in units of slope_se
    std::string verdict; // a candidate name or "inconclusive"
};

// Throws DomainError unless xi >= 2 |s| and every u is nonzero.
D1Verdict discriminate_d1(const D1Config& cfg);
nlohmann::json to_json(const D1Verdict& v);

// Spin 2 spectrum on degrees 13 and 14 with xi^2 = 100.
SpectrumSpec d1_reference_spectrum();

// Spin 2 spectrum on degrees 2..8 with c_l proportional to (1 + l)^-2, normalized.
SpectrumSpec reference_spectrum();

} // namespace lkspin
