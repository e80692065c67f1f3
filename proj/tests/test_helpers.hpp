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

// Random generators for property-style tests.
#pragma once

#include <complex>
#include <random>

#include "rsep/operator_core.hpp"

namespace rsep::testing {

inline ComplexMatrix random_matrix(std::mt19937_64 &rng, Eigen::Index rows,
                                   Eigen::Index cols) {
    std::normal_distribution<double> n;
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = Complex(n(rng), n(rng));
        }
    }
    return m;
}

inline HermitianOperator random_hermitian(std::mt19937_64 &rng, Eigen::Index dim) {
    const ComplexMatrix g = random_matrix(rng, dim, dim);
    return HermitianOperator(((g + g.adjoint()) / 2.0).eval());
}

inline HermitianOperator random_density(std::mt19937_64 &rng, Eigen::Index dim) {
    const ComplexMatrix g = random_matrix(rng, dim, dim);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace();
    return HermitianOperator(((rho + rho.adjoint()) / 2.0).eval());
}

inline ComplexMatrix random_unitary(std::mt19937_64 &rng, Eigen::Index dim) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, dim, dim));
    return qr.householderQ();
}

inline PureState random_state(std::mt19937_64 &rng, Eigen::Index dim) {
    return PureState::normalized(random_matrix(rng, dim, 1).col(0));
}

} // namespace rsep::testing
