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
#include <random>
#include <string>
#include <vector>

#include "rsep/instance_config.hpp"
#include "rsep/rsep_decomposition.hpp"

using namespace rsep;

namespace {

constexpr double kPinnedEpsilonLow = 0.112060546875;
constexpr double kPinnedEpsilonHigh = 0.11212158203125;

InstanceConfig config(const std::string &lattice, const std::string &mset,
                      const std::string &psi, const json &maps) {
    return InstanceConfig{json{{"lattice", lattice},
                               {"basis", "aligned:2:zero"},
                               {"measurement_set", mset},
                               {"psi", psi},
                               {"site_maps", maps}},
                          "."};
}

InstanceConfig recipe2(const std::string &lattice, double eps,
                       const std::string &mset = "pauli:2") {
    return config(lattice, mset, "diag:2", {{"recipe", 2}, {"epsilon", eps}});
}

} // namespace

TEST(SiteClasses, CycleHasTwoLegOrdersChainHasThree) {
    EXPECT_EQ(site_classes(build_instance(recipe2("cycle:5", 0.1))).size(), 2u);
    const auto classes = site_classes(build_instance(recipe2("chain:4", 0.1)));
    ASSERT_EQ(classes.size(), 3u);
    std::size_t total = 0;
    for (const auto &c : classes) {
        total += c.sites.size();
    }
    EXPECT_EQ(total, 4u);
}

TEST(SiteOutputTable, TracesFactorizeForRecipe2) {
    const auto inst = build_instance(recipe2("cycle:3", 0.2));
    const auto table = site_output_table(inst, 0);
    EXPECT_EQ(table.traces.size(), 16u);
    const auto fact = trace_factorization(table);
    EXPECT_TRUE(fact.factorizable) << fact.reason;
    EXPECT_LE(fact.residual, 1e-12);
}

TEST(Positivity, CertifiedAtZeroWithPsiMargin) {
    const auto inst = build_instance(recipe2("cycle:4", 0.0));
    const double margin =
        dual_margin(state_from_spec("diag:2").projector(), inst.measurement_set())
            .strict_margin;
    EXPECT_NEAR(margin, 0.044658198738520435, 1e-12);
    const auto report = rv_positivity_check(inst);
    EXPECT_TRUE(report.certified);
    EXPECT_GE(report.slack, margin - 1e-9);
    EXPECT_FALSE(report.witness.has_value());
}

TEST(Positivity, WitnessBeyondThreshold) {
    const auto inst = build_instance(recipe2("cycle:4", 0.3));
    const auto report = rv_positivity_check(inst);
    EXPECT_FALSE(report.certified);
    ASSERT_TRUE(report.witness.has_value());
    ASSERT_TRUE(report.witness->element.has_value());
    const double v = report.witness->value;
    EXPECT_TRUE(v < -kProbabilityTolerance || v > 1.0 + kProbabilityTolerance) << v;
    EXPECT_EQ(report.witness->tuple.size(), 2u);
}

TEST(Positivity, NoisyMeasurementsWidenTheWindow) {
    EXPECT_TRUE(
        rv_positivity_check(build_instance(recipe2("chain:4", 0.2, "noisy-pauli:2:0.6")))
            .certified);
    EXPECT_FALSE(rv_positivity_check(build_instance(recipe2("chain:4", 0.2))).certified);
}

TEST(Positivity, Recipe1CertifiedAtZeroForComplexAnchor) {
    auto cfg = config("cycle:3", "pauli:2", "diag:2",
                      {{"recipe", 1}, {"epsilon", 0.0}, {"seed", 4}});
    cfg.document["basis"] = "aligned:2:plus-diag";
    EXPECT_TRUE(rv_positivity_check(build_instance(cfg)).certified);
}

TEST(TraceFactorization, RandomRankOneTensors) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (std::size_t v = 1; v <= 4; ++v) {
        std::vector<std::vector<double>> factors(v, std::vector<double>(4));
        for (auto &f : factors) {
            for (double &x : f) {
                x = u(rng);
            }
        }
        std::vector<double> traces(int_pow(4, v));
        for (std::size_t flat = 0; flat < traces.size(); ++flat) {
            std::size_t rem = flat;
            double prod = 1.0;
            for (std::size_t j = v; j-- > 0;) {
                prod *= factors[j][rem % 4];
                rem /= 4;
            }
            traces[flat] = prod;
        }
        const auto result = trace_factorization(traces, v, 4);
        EXPECT_TRUE(result.factorizable) << result.reason;
        EXPECT_LE(result.residual, 1e-12);
        for (std::size_t j = 1; j < v; ++j) {
            EXPECT_NEAR(*std::max_element(result.factors[j].begin(),
                                          result.factors[j].end()),
                        1.0, 1e-15);
        }
    }
}

TEST(TraceFactorization, RejectsFullRank) {
    const std::vector<double> traces{1.0, 2.0, 3.0, 1.0};
    const auto result = trace_factorization(traces, 2, 2);
    EXPECT_FALSE(result.factorizable);
    EXPECT_GT(result.residual, kFactorizationTolerance);
    EXPECT_THROW(trace_factorization(std::vector<double>{1.0, -1.0}, 1, 2), UsageError);
    EXPECT_THROW(trace_factorization(traces, 3, 2), UsageError);
}

TEST(EdgeDistribution, NormMatchesAssembledState) {
    for (const std::string lat : {"chain:2", "chain:3", "chain:4", "chain:5", "chain:6",
                                  "cycle:3", "cycle:4"}) {
        for (double eps : {0.0, 0.05, 0.2}) {
            const auto inst = build_instance(recipe2(lat, eps));
            const auto dist = edge_distribution(inst);
            const double t = assemble_exact_state(inst).norm_squared;
            EXPECT_NEAR(dist.norm_squared / t, 1.0, 1e-10) << lat << " " << eps;
            for (const auto &p : dist.probabilities) {
                double sum = 0.0;
                for (double x : p) {
                    EXPECT_GT(x, 0.0);
                    sum += x;
                }
                EXPECT_NEAR(sum, 1.0, 1e-12);
            }
        }
    }
}

TEST(EdgeDistribution, MatchesBruteForceWeights) {
    const auto inst = build_instance(recipe2("cycle:3", 0.1));
    const auto dist = edge_distribution(inst);
    const auto weights = assignment_weights(inst, dist.norm_squared);
    std::size_t flat = 0;
    for_each_assignment(inst, [&](const auto &lambda, const auto &) {
        double p = 1.0;
        for (std::size_t e = 0; e < lambda.size(); ++e) {
            p *= dist.probabilities[e][lambda[e]];
        }
        EXPECT_NEAR(weights[flat], p, 1e-12);
        ++flat;
    });
    EXPECT_EQ(flat, 64u);
}

TEST(EdgeDistribution, Recipe1OnCycleIsUnsupported) {
    const auto cfg = config("cycle:3", "pauli:2", "diag:2",
                            {{"recipe", 1}, {"epsilon", 0.05}, {"seed", 2}});
    EXPECT_THROW(edge_distribution(build_instance(cfg)), UnsupportedInstance);
}

TEST(Mixture, EqualsExactDensity) {
    for (const std::string lat : {"cycle:3", "cycle:4"}) {
        for (double eps : {0.0, 0.2}) {
            const auto inst = build_instance(recipe2(lat, eps));
            const auto mix = reconstruct_mixture(inst);
            const auto exact = assemble_exact_state(inst).normalized();
            EXPECT_LE(trace_distance(mix.density, exact.projector()), 1e-10)
                << lat << " " << eps;
            EXPECT_NEAR(mix.weight_sum, 1.0, 1e-10);
        }
    }
}

TEST(EpsilonSearch, PinnedBracket) {
    const auto base = recipe2("cycle:4", 0.0);
    const auto br = max_epsilon_search(
        [&](double e) { return build_instance(base.with_epsilon(e)); }, 1.0);
    EXPECT_TRUE(br.bounded());
    EXPECT_LE(br.width(), 1e-4);
    EXPECT_TRUE(br.low_verified);
    EXPECT_TRUE(br.high_verified);
    EXPECT_DOUBLE_EQ(br.low, kPinnedEpsilonLow);
    EXPECT_DOUBLE_EQ(br.high, kPinnedEpsilonHigh);
}

TEST(EpsilonSearch, UnboundedWhenNothingFails) {
    const auto base = recipe2("cycle:3", 0.0, "noisy-pauli:2:0.1");
    const auto br = max_epsilon_search(
        [&](double e) { return build_instance(base.with_epsilon(e)); }, 0.05,
        {4, 1e-3});
    EXPECT_FALSE(br.bounded());
    EXPECT_DOUBLE_EQ(br.low, 0.05);
}
