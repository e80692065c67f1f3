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
#include <vector>

#include "rsep/operator_basis.hpp"
#include "rsep/operator_core.hpp"
#include "test_helpers.hpp"

using namespace rsep;
using rsep::testing::random_density;
using rsep::testing::random_hermitian;
using rsep::testing::random_state;
using rsep::testing::random_unitary;

namespace {

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

const HermitianOperator &a00() {
    static const HermitianOperator op = phase_point_basis().element(0);
    return op;
}

PureState bell_phi_plus() { return max_ent_state(2); }

} // namespace

TEST(TensorProduct, IdentityTimesXIsBlockDiagonal) {
    const ComplexMatrix out =
        tensor_product({ComplexMatrix::Identity(2, 2), pauli_x()});
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected.block(0, 0, 2, 2) = pauli_x();
    expected.block(2, 2, 2, 2) = pauli_x();
    EXPECT_EQ(out, expected);
}

TEST(TensorProduct, SingleFactorUnchanged) {
    ComplexMatrix a(2, 3);
    a << 1, 2, 3, Complex(0, 4), 5, 6;
    EXPECT_EQ(tensor_product({a}), a);
}

TEST(TensorProduct, PhasePointWithItsTransposeHasUnitTrace) {
    const ComplexMatrix out =
        tensor_product({a00().matrix(), a00().matrix().transpose().eval()});
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-14);
    EXPECT_NEAR(out.trace().imag(), 0.0, 1e-14);
}

TEST(TensorProduct, EmptyListIsUsageError) {
    EXPECT_THROW(tensor_product(std::span<const ComplexMatrix>{}), UsageError);
}

TEST(TensorProduct, AssociativeOnIntegerEntries) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> digit(-3, 3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ComplexMatrix> f;
        for (int k = 0; k < 3; ++k) {
            ComplexMatrix m(2 + k % 2, 2);
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                m.data()[i] = Complex(digit(rng), digit(rng));
            }
            f.push_back(m);
        }
        EXPECT_EQ(kron(kron(f[0], f[1]), f[2]), kron(f[0], kron(f[1], f[2])));
    }
}

TEST(PartialTrace, MaximallyEntangledMarginalIsMixed) {
    const std::size_t dims[] = {2, 2};
    const std::size_t keep[] = {0};
    const auto reduced = partial_trace(bell_phi_plus().projector(), dims, keep);
    EXPECT_LT(max_abs_diff(reduced.matrix(), ComplexMatrix::Identity(2, 2) / 2.0),
              1e-15);
}

TEST(PartialTrace, ProductInputFactorizes) {
    std::mt19937_64 rng(3);
    const auto sigma = random_hermitian(rng, 2);
    const auto tau = random_hermitian(rng, 3);
    const HermitianOperator prod(kron(sigma.matrix(), tau.matrix()));
    const std::size_t dims[] = {2, 3};
    const std::size_t keep_first[] = {0};
    const std::size_t keep_second[] = {1};
    EXPECT_LT(max_abs_diff(partial_trace(prod, dims, keep_first).matrix(),
                           sigma.matrix() * tau.trace()),
              1e-12);
    EXPECT_LT(max_abs_diff(partial_trace(prod, dims, keep_second).matrix(),
                           tau.matrix() * sigma.trace()),
              1e-12);
}

TEST(PartialTrace, PhasePointBondSumHasMixedMarginal) {
    const auto basis = phase_point_basis();
    ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
    for (const auto &a : basis.elements()) {
        sum += kron(a.matrix(), a.matrix().transpose());
    }
    const std::size_t dims[] = {2, 2};
    const std::size_t keep[] = {0};
    const auto reduced = partial_trace(HermitianOperator((sum / 4.0).eval()), dims, keep);
    EXPECT_LT(max_abs_diff(reduced.matrix(), ComplexMatrix::Identity(2, 2) / 2.0),
              1e-15);
}

TEST(PartialTrace, DimensionMismatchIsUsageError) {
    const std::size_t dims[] = {2, 3};
    const std::size_t keep[] = {0};
    EXPECT_THROW(partial_trace(identity_operator(4), dims, keep), UsageError);
    const std::size_t ok_dims[] = {2, 2};
    EXPECT_THROW(partial_trace(identity_operator(4), ok_dims, {}), UsageError);
}

TEST(PartialTrace, PreservesTraceOnRandomInputs) {
    std::mt19937_64 rng(7);
    const std::size_t dims[] = {2, 3, 2};
    for (int trial = 0; trial < 50; ++trial) {
        const auto op = random_hermitian(rng, 12);
        std::vector<std::size_t> keep;
        for (std::size_t p = 0; p < 3; ++p) {
            if ((trial >> p) & 1) {
                keep.push_back(p);
            }
        }
        if (keep.empty()) {
            keep.push_back(trial % 3);
        }
        EXPECT_NEAR(partial_trace(op, dims, keep).trace(), op.trace(), 1e-12);
    }
}

TEST(MinEigenvalue, KnownSpectra) {
    EXPECT_NEAR(min_eigenvalue(identity_operator(2)), 1.0, 1e-14);
    EXPECT_NEAR(min_eigenvalue(a00()), (1.0 - std::sqrt(3.0)) / 2.0, 1e-12);
    EXPECT_NEAR(min_eigenvalue(PureState::basis_state(2, 0).projector()), 0.0, 1e-14);
}

TEST(MinEigenvalue, UnitarilyInvariant) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 30; ++trial) {
        const auto sigma = random_hermitian(rng, 5);
        const auto u = random_unitary(rng, 5);
        const ComplexMatrix rotated = u * sigma.matrix() * u.adjoint();
        const HermitianOperator r(((rotated + rotated.adjoint()) / 2.0).eval());
        EXPECT_NEAR(min_eigenvalue(r), min_eigenvalue(sigma), 1e-9);
    }
}

TEST(EntanglementEntropy, KnownValues) {
    const std::size_t dims[] = {2, 2};
    const std::size_t cut[] = {0};
    EXPECT_NEAR(entanglement_entropy(bell_phi_plus(), dims, cut), 1.0, 1e-12);
    EXPECT_NEAR(entanglement_entropy(PureState::basis_state(4, 0), dims, cut), 0.0,
                1e-12);
    const double eps = 0.5;
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = 1.0;
    v(3) = eps * eps;
    EXPECT_NEAR(entanglement_entropy(PureState::normalized(v), dims, cut),
                0.3227569588973982, 1e-9);
}

TEST(EntanglementEntropy, SymmetricUnderComplement) {
    std::mt19937_64 rng(23);
    const std::size_t dims[] = {2, 3, 2};
    for (int trial = 0; trial < 30; ++trial) {
        const auto psi = random_state(rng, 12);
        const std::size_t cut[] = {static_cast<std::size_t>(trial % 3)};
        std::vector<std::size_t> rest;
        for (std::size_t p = 0; p < 3; ++p) {
            if (p != cut[0]) {
                rest.push_back(p);
            }
        }
        EXPECT_NEAR(entanglement_entropy(psi, dims, cut),
                    entanglement_entropy(psi, dims, rest), 1e-9);
    }
}

TEST(EntanglementEntropy, DimensionMismatchIsUsageError) {
    const std::size_t dims[] = {2, 3};
    const std::size_t cut[] = {0};
    EXPECT_THROW(entanglement_entropy(bell_phi_plus(), dims, cut), UsageError);
}

TEST(HermitianOperator, RejectsNonHermitianInput) {
    ComplexMatrix m(2, 2);
    m << 1, 1e-9, 0, 1;
    EXPECT_THROW(HermitianOperator{m}, ValidationError);
    m(0, 1) = 1e-11;
    EXPECT_NO_THROW(HermitianOperator{m});
}

TEST(PureState, RejectsUnnormalizedAmplitudes) {
    ComplexVector v(2);
    v << 1.0, 1e-3;
    EXPECT_THROW(PureState{v}, ValidationError);
    EXPECT_NO_THROW(PureState::normalized(v));
}

TEST(TraceDistance, DensityMatricesStayInUnitInterval) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_density(rng, 4);
        const auto b = random_density(rng, 4);
        const double t = trace_distance(a, b);
        EXPECT_GE(t, 0.0);
        EXPECT_LE(t, 1.0 + 1e-12);
        EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-12);
    }
}
