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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lkspin/cli.hpp"
#include "lkspin/errors.hpp"
#include "lkspin/expectations.hpp"

using namespace lkspin;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("lkspin_test_" + name);
}

} // namespace

TEST_CASE("ranges include their endpoints") {
    const auto a = parse_range("-2:2:0.5");
    REQUIRE(a.size() == 9);
    CHECK(a.front() == -2.0);
    CHECK(a.back() == 2.0);
    const auto b = parse_range("0:1:0.1");
    REQUIRE(b.size() == 11);
    CHECK(b.back() == doctest::Approx(1.0).epsilon(1e-15));
    const auto c = parse_range("1:0:-0.25");
    REQUIRE(c.size() == 5);
    CHECK(c.back() == 0.0);
    CHECK(parse_range("0.5") == std::vector<double>{0.5});
    CHECK(parse_range("1,-2,3") == std::vector<double>{1.0, -2.0, 3.0});
    CHECK(parse_range("0:0:1").size() == 1);
}

TEST_CASE("bad ranges are configuration errors") {
    CHECK_THROWS_AS(parse_range(""), ConfigError);
    CHECK_THROWS_AS(parse_range("0:1"), ConfigError);
    CHECK_THROWS_AS(parse_range("0:1:0"), ConfigError);
    CHECK_THROWS_AS(parse_range("0:1:-0.1"), ConfigError);
    CHECK_THROWS_AS(parse_range("a"), ConfigError);
    CHECK_THROWS_AS(parse_range("1,,2"), ConfigError);
    CHECK_THROWS_AS(parse_range("0:1e9:1e-9"), ConfigError);
}

TEST_CASE("resolutions") {
    const Resolution r = parse_resolution("32");
    CHECK((r.n_phi == 32 && r.n_theta == 32 && r.n_psi == 32));
    const Resolution q = parse_resolution("16x24x8");
    CHECK((q.n_phi == 16 && q.n_theta == 24 && q.n_psi == 8));
    CHECK_THROWS_AS(parse_resolution("4"), ConfigError);
    CHECK_THROWS_AS(parse_resolution("16x16"), ConfigError);
    CHECK_THROWS_AS(parse_resolution("16xx16"), ConfigError);
}

TEST_CASE("spectrum files are normalized") {
    const auto path = temp_path("spectrum.json");
    {
        std::ofstream f(path);
        f << R"({"s": 1, "coeffs": {"1": 3.0, "2": 1.0}})";
    }
    const SpectrumSpec spec = load_spectrum(path.string());
    CHECK(spec.s == 1);
    CHECK(is_normalized(spec, 1e-12));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_spectrum(path.string()), ConfigError);
    CHECK(load_spectrum("reference").coeffs.size() == 7);
}

TEST_CASE("expect csv over a threshold grid") {
    const Run r = run({"expect", "--xi", "2", "--s", "1", "--u", "-2:2:0.5", "--manifold", "so3", "--out", "csv"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == std::vector<std::string>{"u", "EL0", "EL1", "EL2", "EL3", "regime"});
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][4]) < std::stod(rows[i - 1][4]));
    // u = 0 row against the closed form
    CHECK(std::stod(rows[5][1]) == doctest::Approx(-6.125).epsilon(1e-12));
}

TEST_CASE("expect on SU(2) doubles every value") {
    const auto so3 = nlohmann::json::parse(run({"expect", "--xi", "3", "--s", "2", "--u", "0.7"}).out);
    const auto su2 = nlohmann::json::parse(run({"expect", "--xi", "3", "--s", "2", "--u", "0.7", "--manifold", "su2"}).out);
    for (const char* k : {"EL0", "EL1", "EL2", "EL3"}) {
        CHECK(su2["rows"][0][k].get<double>() == 2.0 * so3["rows"][0][k].get<double>());
    }
}

TEST_CASE("geometry at the standard metric") {
    const Run r = run({"geometry", "--xi", "1", "--s", "1", "--theta", "1.5708", "--out", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["scal"].get<double>() == doctest::Approx(1.5).epsilon(1e-12));
    const auto& g = j["points"][0]["gram"];
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) CHECK(g[a][b].get<double>() == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-5));
    }
    CHECK(j["points"][0]["christoffel"].size() == 3);
    CHECK(run({"geometry", "--xi", "1", "--s", "1", "--theta", "0"}).code == 1);
    const Run csv = run({"geometry", "--xi", "2", "--s", "1", "--theta", "0.5:2.5:0.5", "--out", "csv"});
    CHECK(csv_rows(csv.out).size() == 6);
}

TEST_CASE("e-funcs match the closed forms") {
    const auto j = nlohmann::json::parse(run({"e-funcs", "--a", "4", "--b", "4", "--c", "1"}).out);
    CHECK(j["quadrature"]["E1"].get<double>() == doctest::Approx(E1_closed(2.0, 1.0)).epsilon(1e-8));
    CHECK(j["quadrature"]["E2"].get<double>() == doctest::Approx(E2_closed(2.0, 1.0)).epsilon(1e-8));
    CHECK(j["closed"]["E1"].get<double>() == E1_closed(2.0, 1.0));
    const auto k = nlohmann::json::parse(run({"e-funcs", "--a", "1", "--b", "2", "--c", "3", "--mc-samples", "1000"}).out);
    CHECK(k["closed"].is_null());
    CHECK(k["monte_carlo"]["samples"].get<int>() == 1000);
}

TEST_CASE("euclidean constants") {
    const auto j = nlohmann::json::parse(run({"euclidean", "--a", "1", "--b", "4", "--c", "2", "--u", "0"}).out);
    CHECK(j["gamma_tgc"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
    const auto k = nlohmann::json::parse(run({"euclidean", "--a", "1", "--b", "1", "--c", "1"}).out);
    CHECK(k["rows"][0]["L3"].get<double>() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("identical invocations give identical bytes") {
    const std::vector<std::string> args{"synth", "--seed", "7", "--resolution", "8", "--threads", "1"};
    const Run a = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == run(args).out);
    std::vector<std::string> more = args;
    more.back() = "3";
    CHECK(a.out == run(more).out);
    CHECK(a.out != run({"synth", "--seed", "8", "--resolution", "8"}).out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["grid"]["values"].size() == 512);
    CHECK(j["realization"]["seed"].get<int>() == 7);
}

TEST_CASE("estimate from a stored realization matches the seeded one") {
    const auto path = temp_path("field.json");
    REQUIRE(run({"synth", "--seed", "4", "--resolution", "8", "--output", path.string()}).out.empty());
    const Run stored = run({"estimate", "--field", path.string(), "--resolution", "16", "--u", "-1,1", "--out", "csv"});
    const Run seeded = run({"estimate", "--seed", "4", "--resolution", "16", "--u", "-1,1", "--out", "csv"});
    REQUIRE(stored.code == 0);
    CHECK(stored.out == seeded.out);
    CHECK(csv_rows(stored.out).size() == 3);
    std::filesystem::remove(path);
}

TEST_CASE("mc-validate writes results and a manifest") {
    const auto manifest_path = temp_path("manifest.json");
    const Run r = run({"mc-validate", "--trials", "2", "--resolution", "12", "--u", "-8", "--out", "csv", "--manifest",
                       manifest_path.string()});
    CHECK((r.code == 0 || r.code == 2));
    CHECK(csv_rows(r.out).size() == 5);
    std::ifstream in(manifest_path);
    const auto m = nlohmann::json::parse(in);
    CHECK(m["master_seed"].get<int>() == 1);
    CHECK(m["config_hash"].get<std::string>().size() == 16);
    CHECK_FALSE(m.contains("timing"));
    std::filesystem::remove(manifest_path);
}

TEST_CASE("acceptance-style breaches exit with 2") {
    const Run ok = run({"mc-validate", "--mode", "covariance", "--trials", "50", "--points", "2", "--z-max", "100"});
    CHECK(ok.code == 0);
    const Run breach = run({"mc-validate", "--mode", "covariance", "--trials", "50", "--points", "2", "--z-max", "0"});
    CHECK(breach.code == 2);
    CHECK(nlohmann::json::parse(breach.out)["breach"].get<bool>());
    CHECK_FALSE(breach.err.empty());
}

TEST_CASE("argument errors exit with 1 and usage") {
    const Run unknown = run({"expect", "--xi", "2", "--s", "1", "--bogus"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("Usage") != std::string::npos);
    CHECK(unknown.out.empty());
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"expect", "--xi", "2"}).code == 1);
    CHECK(run({"expect", "--xi", "2", "--s", "1", "--out", "xml"}).code == 1);
    CHECK(run({"expect", "--xi", "-1", "--s", "1"}).code == 1);
    CHECK(run({"expect", "--xi", "2", "--s", "1", "--u", "0:1:0"}).code == 1);
    CHECK(run({"d1-test", "--spectrum", "reference", "--trials", "2"}).code == 1);
    CHECK(run({"d1-test", "--u", "0,0.5", "--trials", "2"}).code == 1);
    CHECK(run({"estimate", "--resolution", "4"}).code == 1);
}

TEST_CASE("help and version exit with 0") {
    const Run h = run({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("mc-validate") != std::string::npos);
    CHECK(run({"expect", "--help"}).code == 0);
    CHECK(run({"--version"}).out == "0.1.0\n");
}

TEST_CASE("output file replaces standard output") {
    const auto path = temp_path("expect.csv");
    const Run r = run({"expect", "--xi", "2", "--s", "1", "--out", "csv", "--output", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == run({"expect", "--xi", "2", "--s", "1", "--out", "csv"}).out);
    std::filesystem::remove(path);
}
