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
#include <vector>

#include "rsep/measurement_dual.hpp"
#include "rsep/operator_basis.hpp"

using namespace rsep;

namespace {

HermitianOperator product_of_phase_points(std::initializer_list<std::size_t> ks) {
    const auto basis = phase_point_basis();
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (auto k : ks) {
        out = kron(out, basis.element(k).matrix());
    }
    return HermitianOperator(out);
}

} // namespace

TEST(PauliMeasurements, CountsAndLabels) {
    const auto m1 = pauli_product_measurements(1);
    EXPECT_EQ(m1.size(), 3u);
    EXPECT_EQ(m1.dim(), 2u);
    EXPECT_TRUE(m1.find("X").has_value());
    const auto m2 = pauli_product_measurements(2);
    EXPECT_EQ(m2.size(), 9u);
    EXPECT_EQ(m2.element_count(), 36u);
    EXPECT_EQ(*m2.find("XZ"), 2u);
    EXPECT_FALSE(m2.find("ZZZ").has_value());
}

TEST(PauliMeasurements, ZZElementsAreComputationalProjectors) {
    const auto m = pauli_product_measurements(2);
    const auto &zz = m.povm(*m.find("ZZ"));
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_LT(max_abs_diff(zz.element(j).matrix(),
                               PureState::basis_state(4, j).projector().matrix()),
                  1e-15);
    }
}

TEST(DualMargin, PhasePointsGiveDeterministicPauliOutcomes) {
    const auto mset = pauli_product_measurements(1);
    const auto basis = phase_point_basis();
    for (const auto &a : basis.elements()) {
        const auto margin = dual_margin(a, mset);
        EXPECT_TRUE(margin.in_dual(1e-12));
        EXPECT_FALSE(margin.strict());
        EXPECT_NEAR(margin.min_overlap, 0.0, 1e-12);
        EXPECT_NEAR(margin.max_overlap, 1.0, 1e-12);
    }
}

TEST(DualMargin, TwoQubitProductsOfPhasePoints) {
    const auto mset = pauli_product_measurements(2);
    double worst = 1.0;
    for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t l = 0; l < 4; ++l) {
            const auto margin = dual_margin(product_of_phase_points({k, l}), mset);
            EXPECT_TRUE(margin.in_dual(1e-12));
            worst = std::min(worst, margin.strict_margin);
        }
    }
    EXPECT_NEAR(worst, 0.0, 1e-12);
}

TEST(DualMargin, MixedStateIsStrictlyInside) {
    const auto margin = dual_margin(HermitianOperator((identity_operator(2).matrix() / 2.0).eval()),
                                    pauli_product_measurements(1));
    EXPECT_TRUE(margin.strict());
    EXPECT_NEAR(margin.strict_margin, 0.5, 1e-14);
}

TEST(DualMargin, ComputationalBasisProjectorIsOnTheBoundary) {
    const auto margin = dual_margin(PureState::basis_state(2, 0).projector(),
                                    pauli_product_measurements(1));
    EXPECT_TRUE(margin.in_dual(1e-12));
    EXPECT_FALSE(margin.strict());
}

TEST(DualMargin, DimensionMismatch) {
    EXPECT_THROW(dual_margin(identity_operator(4), pauli_product_measurements(1)),
                 UsageError);
}

TEST(Povm, RejectsIncompleteOrNonPsd) {
    const auto p0 = PureState::basis_state(2, 0).projector();
    const auto p1 = PureState::basis_state(2, 1).projector();
    EXPECT_NO_THROW(Povm("z", {p0, p1}));
    EXPECT_THROW(Povm("half", {p0}), ValidationError);
    const HermitianOperator neg((-p1.matrix()).eval());
    const HermitianOperator big((p0.matrix() + 2.0 * p1.matrix()).eval());
    EXPECT_THROW(Povm("neg", {big, neg}), ValidationError);
}

TEST(NoisyMeasurements, ShrinkTowardsIdentity) {
    const auto mset = noisy(pauli_product_measurements(1), 0.5);
    const auto &e = mset.povm(0).element(0).matrix();
    EXPECT_NEAR(e.trace().real(), 1.0, 1e-14);
    EXPECT_NEAR(eigenvalues(mset.povm(0).element(0)).maxCoeff(), 0.75, 1e-12);
    EXPECT_THROW(noisy(mset, 1.5), UsageError);
}

TEST(MeasurementSetFromName, ParsesKnownForms) {
    EXPECT_EQ(measurement_set_from_name("pauli:2").size(), 9u);
    EXPECT_EQ(measurement_set_from_name("bell").povm(0).label(), "bell");
    EXPECT_EQ(measurement_set_from_name("pauli:2+bell").size(), 10u);
    EXPECT_EQ(measurement_set_from_name("noisy-pauli:1:0.2").size(), 3u);
    EXPECT_THROW(measurement_set_from_name("pauli:x"), UsageError);
    EXPECT_THROW(measurement_set_from_name("ghz"), UsageError);
}

TEST(BellAdmissibility, HeadTailPairIsExactlyAdmissible) {
    const auto basis = phase_point_basis();
    const VirtualSpaceTag tags[] = {{basis, false}, {basis, true}};
    const auto report = admissible_povm(bell_povm(), tags);
    EXPECT_TRUE(report.admissible);
    EXPECT_EQ(report.values_checked, 64u);
    EXPECT_NEAR(report.min_value, 0.0, 1e-12);
    EXPECT_NEAR(report.max_value, 1.0, 1e-12);
}

TEST(BellAdmissibility, HeadHeadPairFailsWithWitness) {
    const auto basis = phase_point_basis();
    const VirtualSpaceTag tags[] = {{basis, false}, {basis, false}};
    const auto report = admissible_povm(bell_povm(), tags);
    EXPECT_FALSE(report.admissible);
    EXPECT_NEAR(report.min_value, -0.5, 1e-12);
    EXPECT_NEAR(report.witness.value, -0.5, 1e-12);
    ASSERT_EQ(report.witness.tuple.size(), 2u);
    const ComplexMatrix v =
        kron(basis.element(report.witness.tuple[0]).matrix(),
             basis.element(report.witness.tuple[1]).matrix());
    EXPECT_NEAR(hs_inner(HermitianOperator(v),
                         bell_povm().element(report.witness.element)),
                -0.5, 1e-12);
}

TEST(BellAdmissibility, DimensionMismatch) {
    const auto basis = phase_point_basis();
    const VirtualSpaceTag tags[] = {{basis, false}};
    EXPECT_THROW(admissible_povm(bell_povm(), tags), UsageError);
}
