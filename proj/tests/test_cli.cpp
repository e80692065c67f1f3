// Copyright 2026 The rsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "cli_runner.hpp"
#include "rsep/io.hpp"

using rsep::json;
using rsep::testing::run_cli;
using rsep::testing::ScratchDir;

namespace {

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string build_instance(const ScratchDir &dir, const std::string &name,
                           const std::string &args) {
    const auto path = dir.file(name);
    const auto r = run_cli("peps build " + args + " --out " + path);
    EXPECT_EQ(r.exit_code, 0) << args;
    return path;
}

} // namespace

TEST(Cli, NoArgumentsIsUsageError) {
    EXPECT_EQ(run_cli("").exit_code, 2);
    EXPECT_EQ(run_cli("frobnicate").exit_code, 2);
    EXPECT_EQ(run_cli("--help").exit_code, 0);
}

TEST(Cli, BasisGenAndVerify) {
    ScratchDir dir;
    const auto path = dir.file("b.json");
    ASSERT_EQ(run_cli("basis gen --D 2 --anchor plus-diag --out " + path).exit_code, 0);
    const auto basis = json::parse(slurp(path));
    EXPECT_EQ(basis.at("elements").size(), 4u);
    const auto r = run_cli("basis verify " + path);
    ASSERT_EQ(r.exit_code, 0);
    const auto report = json::parse(r.out);
    EXPECT_LE(report.at("reconstruction_error").get<double>(), 1e-12);
    EXPECT_NEAR(report.at("min_anchor_overlap").get<double>(), 1.0 / std::sqrt(2.0),
                1e-10);
}

TEST(Cli, CorruptedBasisExitsTwo) {
    ScratchDir dir;
    const auto path = dir.file("b.json");
    ASSERT_EQ(run_cli("basis gen --D 3 --out " + path).exit_code, 0);
    auto basis = json::parse(slurp(path));
    basis["elements"][0]["re"][0][0] = 5.0;
    std::ofstream(path) << basis.dump();
    EXPECT_EQ(run_cli("basis verify " + path).exit_code, 2);
    std::ofstream(path) << "not json";
    EXPECT_EQ(run_cli("basis verify " + path).exit_code, 2);
    EXPECT_EQ(run_cli("basis verify " + dir.file("missing.json")).exit_code, 1);
}

TEST(Cli, DualMargin) {
    auto r = run_cli("dual margin --state diag:2 --measurements pauli:2");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NEAR(json::parse(r.out).at("strict_margin").get<double>(),
                0.044658198738520435, 1e-12);
    r = run_cli("dual margin --state zero:2 --measurements pauli:1 --require-strict");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_FALSE(json::parse(r.out).at("strict").get<bool>());
}

TEST(Cli, LatticeGen) {
    const auto r = run_cli("lattice gen torus:3x3");
    ASSERT_EQ(r.exit_code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("n_sites"), 9);
    EXPECT_EQ(j.at("edges").size(), 18u);
    EXPECT_EQ(run_cli("lattice gen torus:2x9").exit_code, 2);
}

TEST(Cli, PepsBuildCheckAndEpsilonMax) {
    ScratchDir dir;
    const auto inst = build_instance(
        dir, "inst.json", "--lattice cycle:4 --measurements pauli:2 --psi diag:2 --recipe 2");
    auto r = run_cli("peps check " + inst);
    ASSERT_EQ(r.exit_code, 0);
    auto cert = json::parse(r.out);
    EXPECT_TRUE(cert.at("certified").get<bool>());
    EXPECT_TRUE(cert.at("factorizable").get<bool>());
    EXPECT_EQ(cert.at("site_min_margin").size(), 4u);
    r = run_cli("peps check " + inst + " --epsilon 0.3");
    EXPECT_EQ(r.exit_code, 3);
    cert = json::parse(r.out);
    EXPECT_FALSE(cert.at("witness").is_null());
    r = run_cli("peps epsilon-max " + inst + " --width 1e-3");
    ASSERT_EQ(r.exit_code, 0);
    const auto br = json::parse(r.out);
    EXPECT_LE(br.at("width").get<double>(), 1e-3);
    EXPECT_TRUE(br.at("low_verified").get<bool>());
    EXPECT_TRUE(br.at("high_verified").get<bool>());
}

TEST(Cli, PepsBuildRejectsConstraintViolations) {
    EXPECT_EQ(run_cli("peps build --lattice cycle:4 --measurements pauli:2 --psi zero:4")
                  .exit_code,
              2);
    EXPECT_EQ(run_cli("peps build --lattice torus:3x3 --measurements pauli:2 --psi diag:2")
                  .exit_code,
              2);
    EXPECT_EQ(run_cli("peps build --lattice cycle:4 --measurements pauli:2 --psi diag:2 "
                      "--recipe 7")
                  .exit_code,
              2);
}

TEST(Cli, SampleIsDeterministicAcrossWorkers) {
    ScratchDir dir;
    const auto inst = build_instance(dir, "inst.json",
                                     "--lattice chain:4 --measurements noisy-pauli:2:0.6 "
                                     "--psi diag:2 --epsilon 0.2");
    const auto a = run_cli("sample " + inst + " --uniform ZX --shots 5000 --seed 42");
    const auto b = run_cli("sample " + inst + " --uniform ZX --shots 5000 --seed 42 "
                           "--workers 4");
    const auto c = run_cli("sample " + inst + " --uniform ZX --shots 5000 --seed 43");
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    std::istringstream lines(a.out);
    std::string first;
    std::getline(lines, first);
    const auto rec = json::parse(first);
    EXPECT_EQ(rec.at("shot"), 0);
    EXPECT_EQ(rec.at("outcomes").size(), 4u);
    EXPECT_FALSE(rec.contains("hidden"));
}

TEST(Cli, PlanFileAndHiddenOutput) {
    ScratchDir dir;
    const auto inst = build_instance(dir, "inst.json",
                                     "--lattice chain:3 --measurements noisy-pauli:2:0.6 "
                                     "--psi diag:2 --epsilon 0.2");
    const auto plan = dir.file("plan.json");
    std::ofstream(plan) << R"({"povms": ["ZZ", "XY", "YX"]})";
    const auto shots = dir.file("shots.jsonl");
    ASSERT_EQ(run_cli("sample " + inst + " --plan " + plan +
                      " --shots 20000 --seed 5 --emit-hidden --out " + shots)
                  .exit_code,
              0);
    std::ifstream in(shots);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(json::parse(line).at("hidden").size(), 2u);
    auto r = run_cli("verify " + inst + " --plan " + plan + " --mode independence "
                     "--shots-file " + shots);
    EXPECT_EQ(r.exit_code, 0);
    r = run_cli("verify " + inst + " --plan " + plan + " --mode sampler --shots-file " +
                shots);
    EXPECT_EQ(r.exit_code, 0);
    const auto report = json::parse(r.out);
    for (const char *key : {"tv", "threshold", "pass", "K", "n_shots"}) {
        EXPECT_TRUE(report.contains(key)) << key;
    }
    std::ofstream(plan) << R"({"povms": ["ZZ", "XY"]})";
    EXPECT_EQ(run_cli("sample " + inst + " --plan " + plan + " --shots 10").exit_code, 2);
}

TEST(Cli, VerifyMixtureAndWrongPlan) {
    ScratchDir dir;
    const auto inst = build_instance(dir, "inst.json",
                                     "--lattice cycle:3 --measurements noisy-pauli:2:0.6 "
                                     "--psi uniform:4 --epsilon 0.05");
    auto r = run_cli("verify " + inst + " --uniform XZ --mode mixture");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_LE(json::parse(r.out).at("tv").get<double>(), 1e-10);
    const auto shots = dir.file("shots.jsonl");
    ASSERT_EQ(run_cli("sample " + inst + " --uniform XX --shots 20000 --out " + shots)
                  .exit_code,
              0);
    r = run_cli("verify " + inst + " --uniform XX --mode sampler --shots-file " + shots);
    EXPECT_EQ(r.exit_code, 0);
    r = run_cli("verify " + inst + " --uniform ZZ --mode sampler --shots-file " + shots);
    EXPECT_EQ(r.exit_code, 3);
}

TEST(Cli, NonFactorizableInstanceExitsFour) {
    ScratchDir dir;
    const auto inst = build_instance(dir, "inst.json",
                                     "--lattice cycle:3 --measurements pauli:2 "
                                     "--psi diag:2 --recipe 1 --epsilon 0.05 --seed 1");
    EXPECT_EQ(run_cli("sample " + inst + " --uniform ZZ --shots 10").exit_code, 4);
    const auto r = run_cli("peps check " + inst);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_FALSE(json::parse(r.out).at("factorizable").get<bool>());
}

TEST(Cli, SampleAboveThresholdExitsThree) {
    ScratchDir dir;
    const auto inst = build_instance(dir, "inst.json",
                                     "--lattice cycle:3 --measurements pauli:2 "
                                     "--psi diag:2 --epsilon 0.4");
    EXPECT_EQ(run_cli("sample " + inst + " --uniform ZZ --shots 10").exit_code, 3);
}

TEST(Cli, BenchWritesRows) {
    ScratchDir dir;
    const auto inst = build_instance(dir, "inst.json",
                                     "--lattice cycle:3 --measurements pauli:2 "
                                     "--psi diag:2 --epsilon 0.05");
    const auto r = run_cli("bench " + inst + " --uniform ZZ --sites 10,20 --shots 2000 "
                           "--repeats 1");
    ASSERT_EQ(r.exit_code, 0);
    const auto rows = json::parse(r.out).at("rows");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].at("sites"), 20);
    EXPECT_GT(rows[0].at("sample_seconds").get<double>(), 0.0);
}
