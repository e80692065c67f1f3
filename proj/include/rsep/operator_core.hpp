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

/**
 * @file operator_core.hpp
 * Dense complex-matrix substrate: Hermitian operators, pure states, tensor
 * products, partial traces, spectra and bipartite entanglement.
 *
 * Matrices are Eigen dense types. Multi-party index conventions are
 * big-endian: the first factor of a tensor product is the most significant
 * digit of a flat index.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace rsep {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kStateNormTolerance = 1e-12;

inline bool all_finite(const ComplexMatrix &m) {
    return m.allFinite();
}

inline double max_abs(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw UsageError("max_abs_diff: shape mismatch");
    }
    return max_abs(a - b);
}

inline double hermiticity_defect(const ComplexMatrix &m) {
    return max_abs(m - m.adjoint());
}

/// A square complex matrix that is self-adjoint to within 1e-10 max-norm.
/// Inputs outside the tolerance are rejected, never symmetrized.
class HermitianOperator {
  public:
    HermitianOperator() = default;

    explicit HermitianOperator(ComplexMatrix m) : matrix_(std::move(m)) {
        if (matrix_.rows() < 1 || matrix_.rows() != matrix_.cols()) {
            throw UsageError("HermitianOperator: matrix must be square and "
                             "non-empty");
        }
        if (!all_finite(matrix_)) {
            throw ValidationError("HermitianOperator: non-finite entry");
        }
        const double defect = hermiticity_defect(matrix_);
        if (defect > kHermitianTolerance) {
            throw ValidationError(
                "HermitianOperator: not self-adjoint (defect " +
                std::to_string(defect) + ")");
        }
    }

    [[nodiscard]] std::size_t dim() const {
        return static_cast<std::size_t>(matrix_.rows());
    }
    [[nodiscard]] const ComplexMatrix &matrix() const { return matrix_; }
    [[nodiscard]] double trace() const { return matrix_.trace().real(); }

    /// Transpose in the computational basis.
    [[nodiscard]] HermitianOperator transposed() const {
        return HermitianOperator(matrix_.transpose().eval());
    }

    [[nodiscard]] HermitianOperator scaled(double factor) const {
        return HermitianOperator((factor * matrix_).eval());
    }

  private:
    ComplexMatrix matrix_;
};

/// Real Hilbert-Schmidt inner product tr(AB) of two Hermitian operators.
inline double hs_inner(const HermitianOperator &a, const HermitianOperator &b) {
    if (a.dim() != b.dim()) {
        throw UsageError("hs_inner: dimension mismatch");
    }
    // tr(AB) = sum_ij A_ij B_ji; B Hermitian so B_ji = conj(B_ij).
    return (a.matrix().array() * b.matrix().conjugate().array()).sum().real();
}

/// Unit-norm complex vector.
class PureState {
  public:
    PureState() = default;

    explicit PureState(ComplexVector amplitudes)
        : amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() < 1) {
            throw UsageError("PureState: empty amplitude vector");
        }
        if (!amplitudes_.allFinite()) {
            throw ValidationError("PureState: non-finite amplitude");
        }
        const double norm = amplitudes_.norm();
        if (std::abs(norm - 1.0) > kStateNormTolerance) {
            throw ValidationError("PureState: norm " + std::to_string(norm) +
                                  " differs from 1");
        }
    }

    /// Normalizes @p amplitudes; throws if the norm vanishes.
    static PureState normalized(ComplexVector amplitudes) {
        const double norm = amplitudes.norm();
        if (!(norm > 1e-300)) {
            throw ValidationError("PureState: cannot normalize a zero vector");
        }
        return PureState(amplitudes / norm);
    }

    static PureState basis_state(std::size_t dim, std::size_t index) {
        if (index >= dim) {
            throw UsageError("PureState::basis_state: index out of range");
        }
        ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
        v(static_cast<Eigen::Index>(index)) = 1.0;
        return PureState(std::move(v));
    }

    [[nodiscard]] std::size_t dim() const {
        return static_cast<std::size_t>(amplitudes_.size());
    }
    [[nodiscard]] const ComplexVector &amplitudes() const { return amplitudes_; }

    [[nodiscard]] HermitianOperator projector() const {
        return HermitianOperator(
            (amplitudes_ * amplitudes_.adjoint()).eval());
    }

    /// <psi|O|psi>, real for Hermitian O.
    [[nodiscard]] double expectation(const HermitianOperator &op) const {
        if (op.dim() != dim()) {
            throw UsageError("PureState::expectation: dimension mismatch");
        }
        return amplitudes_.dot(op.matrix() * amplitudes_).real();
    }

  private:
    ComplexVector amplitudes_;
};

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
        }
    }
    return out;
}

inline ComplexVector kron(const ComplexVector &a, const ComplexVector &b) {
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

/// Kronecker product of the factors in list order.
inline ComplexMatrix tensor_product(std::span<const ComplexMatrix> factors) {
    if (factors.empty()) {
        throw UsageError("tensor_product: empty factor list");
    }
    ComplexMatrix out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) {
        out = kron(out, factors[k]);
    }
    return out;
}

inline ComplexMatrix tensor_product(std::initializer_list<ComplexMatrix> factors) {
    return tensor_product(std::span<const ComplexMatrix>(factors.begin(),
                                                         factors.size()));
}

inline HermitianOperator
tensor_product(std::span<const HermitianOperator> factors) {
    if (factors.empty()) {
        throw UsageError("tensor_product: empty factor list");
    }
    ComplexMatrix out = factors.front().matrix();
    for (std::size_t k = 1; k < factors.size(); ++k) {
        out = kron(out, factors[k].matrix());
    }
    return HermitianOperator(std::move(out));
}

inline std::size_t product_of(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                           std::multiplies<>());
}

namespace detail {

/// Splits every flat index of a multipartite space into the flat index over
/// the kept parties and the flat index over the remaining ones.
struct Bipartition {
    std::size_t kept_dim = 1;
    std::size_t rest_dim = 1;
    std::vector<std::size_t> kept_of;
    std::vector<std::size_t> rest_of;
};

inline Bipartition bipartition(std::span<const std::size_t> dims,
                               std::span<const std::size_t> keep) {
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size()) {
            throw UsageError("bipartition: party index out of range");
        }
        if (kept[k]) {
            throw UsageError("bipartition: duplicate party index");
        }
        kept[k] = true;
    }
    Bipartition out;
    const std::size_t total = product_of(dims);
    for (std::size_t p = 0; p < dims.size(); ++p) {
        (kept[p] ? out.kept_dim : out.rest_dim) *= dims[p];
    }
    out.kept_of.resize(total);
    out.rest_of.resize(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        std::size_t kept_idx = 0, kept_stride = 1;
        std::size_t rest_idx = 0, rest_stride = 1;
        for (std::size_t p = dims.size(); p-- > 0;) {
            const std::size_t digit = rem % dims[p];
            rem /= dims[p];
            if (kept[p]) {
                kept_idx += digit * kept_stride;
                kept_stride *= dims[p];
            } else {
                rest_idx += digit * rest_stride;
                rest_stride *= dims[p];
            }
        }
        out.kept_of[flat] = kept_idx;
        out.rest_of[flat] = rest_idx;
    }
    return out;
}

} // namespace detail

/// Reduced operator on the parties listed in @p keep (kept in their original
/// relative order).
inline HermitianOperator partial_trace(const HermitianOperator &op,
                                       std::span<const std::size_t> dims,
                                       std::span<const std::size_t> keep) {
    if (dims.empty() || product_of(dims) != op.dim()) {
        throw UsageError("partial_trace: dims do not multiply to operator "
                         "dimension");
    }
    if (keep.empty()) {
        throw UsageError("partial_trace: keep set must be non-empty");
    }
    const auto split = detail::bipartition(dims, keep);
    // index_of[rest][kept] -> flat
    std::vector<std::size_t> index_of(op.dim());
    for (std::size_t flat = 0; flat < op.dim(); ++flat) {
        index_of[split.rest_of[flat] * split.kept_dim + split.kept_of[flat]] =
            flat;
    }
    const auto kd = static_cast<Eigen::Index>(split.kept_dim);
    ComplexMatrix out = ComplexMatrix::Zero(kd, kd);
    const auto &m = op.matrix();
    for (std::size_t t = 0; t < split.rest_dim; ++t) {
        const std::size_t *row = &index_of[t * split.kept_dim];
        for (Eigen::Index a = 0; a < kd; ++a) {
            for (Eigen::Index b = 0; b < kd; ++b) {
                out(a, b) += m(static_cast<Eigen::Index>(row[a]),
                               static_cast<Eigen::Index>(row[b]));
            }
        }
    }
    // Round-off can leave a ~1e-17 anti-Hermitian part; it is far inside the
    // tolerance and the result is exactly Hermitian in exact arithmetic.
    return HermitianOperator(std::move(out));
}

inline RealVector eigenvalues(const HermitianOperator &op) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(op.matrix(),
                                                        Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

inline double min_eigenvalue(const HermitianOperator &op) {
    return eigenvalues(op)(0);
}

/// (1/2) * trace norm of a - b.
inline double trace_distance(const HermitianOperator &a,
                             const HermitianOperator &b) {
    if (a.dim() != b.dim()) {
        throw UsageError("trace_distance: dimension mismatch");
    }
    const RealVector ev = eigenvalues(HermitianOperator(a.matrix() - b.matrix()));
    return 0.5 * ev.cwiseAbs().sum();
}

/// Shannon entropy in bits, with 0 log 0 = 0.
inline double entropy_bits(const RealVector &weights) {
    double h = 0.0;
    for (double p : weights) {
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

/// Squared Schmidt coefficients of @p state across the cut.
inline RealVector schmidt_weights(const PureState &state,
                                  std::span<const std::size_t> dims,
                                  std::span<const std::size_t> cut) {
    if (dims.empty() || product_of(dims) != state.dim()) {
        throw UsageError("entanglement_entropy: dims do not multiply to state "
                         "dimension");
    }
    if (cut.empty() || cut.size() >= dims.size()) {
        // An empty or full cut is a product split by definition.
        detail::bipartition(dims, cut); // still validates the indices
        return RealVector::Ones(1);
    }
    const auto split = detail::bipartition(dims, cut);
    ComplexMatrix m(static_cast<Eigen::Index>(split.kept_dim),
                    static_cast<Eigen::Index>(split.rest_dim));
    for (std::size_t flat = 0; flat < state.dim(); ++flat) {
        m(static_cast<Eigen::Index>(split.kept_of[flat]),
          static_cast<Eigen::Index>(split.rest_of[flat])) =
            state.amplitudes()(static_cast<Eigen::Index>(flat));
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().array().square();
}

/// Von Neumann entropy (bits) of the reduced state on the parties in @p cut.
inline double entanglement_entropy(const PureState &state,
                                   std::span<const std::size_t> dims,
                                   std::span<const std::size_t> cut) {
    return entropy_bits(schmidt_weights(state, dims, cut));
}

inline HermitianOperator identity_operator(std::size_t dim) {
    return HermitianOperator(ComplexMatrix::Identity(
        static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

/// Matrix rank by singular values above @p relative_tol times the largest.
inline std::size_t numerical_rank(const ComplexMatrix &m,
                                  double relative_tol = 1e-12) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const RealVector s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) {
        return 0;
    }
    return static_cast<std::size_t>(
        (s.array() > relative_tol * s(0)).count());
}

} // namespace rsep
