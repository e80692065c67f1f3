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
#include "rsep/lhv_sampling.hpp"
#include "rsep/verification_oracle.hpp"

using namespace rsep;

namespace {

PepsInstance recipe2_cycle(double eps) {
    return build_instance(InstanceConfig{
        json{{"lattice", "cycle:3"},
             {"basis", "aligned:2:zero"},
             {"measurement_set", "pauli:2"},
             {"psi", "diag:2"},
             {"site_maps", {{"recipe", 2}, {"epsilon", eps}}}},
        "."});
}

std::vector<ShotRecord> draw_from(const JointDistribution &p, std::size_t n,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::discrete_distribution<std::size_t> dist(p.probs().begin(), p.probs().end());
    std::vector<ShotRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rem = dist(rng);
        ShotRecord rec;
        rec.shot = i;
        rec.outcomes.resize(p.arities().size());
        for (std::size_t s = p.arities().size(); s-- > 0;) {
            rec.outcomes[s] = rem % p.arities()[s];
            rem /= p.arities()[s];
        }
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace

TEST(ExactJoint, BellPairInZBasis) {
    const auto mset = pauli_product_measurements(1);
    const std::size_t dims[] = {2, 2};
    MeasurementPlan plan{{2, 2}};
    const auto p = exact_joint_distribution(max_ent_state(2), dims, mset, plan);
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[1], 0.0, 1e-15);
    EXPECT_NEAR(p[3], 0.5, 1e-15);
    plan.povm_index = {1, 1};
    const auto q = exact_joint_distribution(max_ent_state(2), dims, mset, plan);
    EXPECT_NEAR(q[1], 0.5, 1e-15);
    EXPECT_NEAR(q[2], 0.5, 1e-15);
}

TEST(ExactJoint, ChainOfTwoRecipe2) {
    const auto map = recipe2_site_map(1, PureState::basis_state(2, 0), 0.5);
    const PepsInstance inst(build_chain(2), phase_point_basis(),
                            pauli_product_measurements(1), {map}, {0, 0});
    const MeasurementPlan plan{{2, 2}};
    const auto p = exact_joint_distribution(assemble_exact_state(inst),
                                            inst.measurement_set(), plan);
    EXPECT_NEAR(p[0], 0.9411764705882353, 1e-12);
    EXPECT_NEAR(p[3], 0.058823529411764705, 1e-12);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
}

TEST(ExactJoint, MixtureAgreesForEveryUniformPlan) {
    const auto inst = recipe2_cycle(0.1);
    for (const auto &povm : inst.measurement_set().povms()) {
        const auto plan = uniform_plan(inst.measurement_set(), povm.label(), 3);
        const auto exact = exact_joint_distribution(assemble_exact_state(inst),
                                                    inst.measurement_set(), plan);
        const auto mix = mixture_joint_distribution(inst, plan);
        EXPECT_LE(tv_distance(exact, mix), 1e-10) << povm.label();
    }
}

TEST(TvDistance, MetricProperties) {
    const std::vector<std::size_t> ar{2, 2};
    const JointDistribution a(ar, {0.25, 0.25, 0.25, 0.25});
    const JointDistribution b(ar, {1.0, 0.0, 0.0, 0.0});
    EXPECT_NEAR(tv_distance(a, a), 0.0, 1e-15);
    EXPECT_NEAR(tv_distance(a, b), 0.75, 1e-15);
    EXPECT_NEAR(tv_distance(a, b), tv_distance(b, a), 1e-15);
    const JointDistribution c(std::vector<std::size_t>{4}, {0.25, 0.25, 0.25, 0.25});
    EXPECT_THROW(tv_distance(a, c), UsageError);
}

TEST(FrequencyTest, AcceptsOwnSamplesRejectsOthers) {
    const std::vector<std::size_t> ar{2, 3};
    const JointDistribution p(ar, {0.1, 0.2, 0.1, 0.3, 0.2, 0.1});
    const JointDistribution q(ar, {0.3, 0.1, 0.1, 0.1, 0.2, 0.2});
    const auto shots = draw_from(p, 50000, 3);
    EXPECT_TRUE(frequency_test(shots, p).pass);
    EXPECT_FALSE(frequency_test(shots, q).pass);
    const auto r = frequency_test(shots, p);
    EXPECT_NEAR(r.threshold, 4.0 * std::sqrt(6.0 / 50000.0), 1e-15);
}

TEST(FrequencyTest, NeedsEnoughShots) {
    const JointDistribution p(std::vector<std::size_t>{2}, {0.5, 0.5});
    EXPECT_THROW(frequency_test(draw_from(p, 999, 1), p), UsageError);
    EXPECT_THROW(frequency_test(std::vector<ShotRecord>{}, p), UsageError);
}

TEST(ConditionalIndependence, SamplerShotsPass) {
    const auto inst = build_instance(InstanceConfig{
        json{{"lattice", "chain:3"},
             {"basis", "aligned:2:zero"},
             {"measurement_set", "noisy-pauli:2:0.6"},
             {"psi", "diag:2"},
             {"site_maps", {{"recipe", 2}, {"epsilon", 0.2}}}},
        "."});
    const LhvSampler sampler(inst, uniform_plan(inst.measurement_set(), "XZ", 3));
    const auto shots = sampler.run_shots(200000, 8, 1, true);
    const auto report = conditional_independence_test(shots, sampler);
    EXPECT_TRUE(report.pass) << report.tv << " > " << report.threshold;
    EXPECT_EQ(report.cells, report.hidden_values * 64);
}

TEST(ConditionalIndependence, CopiedOutcomesFail) {
    const auto inst = build_instance(InstanceConfig{
        json{{"lattice", "chain:3"},
             {"basis", "aligned:2:zero"},
             {"measurement_set", "noisy-pauli:2:0.6"},
             {"psi", "diag:2"},
             {"site_maps", {{"recipe", 2}, {"epsilon", 0.2}}}},
        "."});
    const LhvSampler sampler(inst, uniform_plan(inst.measurement_set(), "XZ", 3));
    auto shots = sampler.run_shots(200000, 8, 1, true);
    for (auto &rec : shots) {
        rec.outcomes[1] = rec.outcomes[0];
    }
    EXPECT_FALSE(conditional_independence_test(shots, sampler).pass);
    for (auto &rec : shots) {
        rec.hidden.clear();
    }
    EXPECT_THROW(conditional_independence_test(shots, sampler), UsageError);
}
