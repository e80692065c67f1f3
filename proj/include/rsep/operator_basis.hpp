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
 * @file operator_basis.hpp
 * Orthogonal Hermitian operator bases {C_k} with tr(C_k C_l) = D delta_kl.
 *
 * Any such basis splits the maximally entangled bond state as
 *
 *     |phi_D><phi_D| = (1/D^2) sum_k C_k (x) C_k^T ,
 *
 * so the convex hull of the C_k (and of the C_k^T at the other end of the
 * bond) serves as a generalized state space for the virtual particles.
 * Anchored bases additionally have a pure state |phi> with <phi|C_k|phi> > 0
 * for every k.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "operator_core.hpp"

namespace rsep {

inline constexpr double kGramTolerance = 1e-10;
inline constexpr double kDecompositionTolerance = 1e-10;
inline constexpr double kAnchorStrictness = 1e-8;

enum class BasisConstruction { aligned, phase_point, custom };

inline std::string_view to_string(BasisConstruction c) {
    switch (c) {
    case BasisConstruction::aligned:
        return "aligned";
    case BasisConstruction::phase_point:
        return "phase_point";
    case BasisConstruction::custom:
        return "custom";
    }
    return "custom";
}

inline BasisConstruction basis_construction_from_string(std::string_view s) {
    if (s == "aligned") {
        return BasisConstruction::aligned;
    }
    if (s == "phase_point") {
        return BasisConstruction::phase_point;
    }
    if (s == "custom") {
        return BasisConstruction::custom;
    }
    throw UsageError("unknown basis construction '" + std::string(s) + "'");
}

/// (1/sqrt(D)) sum_j |jj>.
inline PureState max_ent_state(std::size_t bond_dim) {
    if (bond_dim < 2) {
        throw UsageError("max_ent_state: D must be at least 2");
    }
    const auto n = static_cast<Eigen::Index>(bond_dim);
    ComplexVector v = ComplexVector::Zero(n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        v(j * n + j) = 1.0 / std::sqrt(static_cast<double>(bond_dim));
    }
    return PureState(std::move(v));
}

/// The +1 eigenstate of (sx + sy + sz)/sqrt(3), first amplitude real positive.
inline PureState plus_diag_state() {
    const double cos_theta = 1.0 / std::sqrt(3.0);
    const double half = std::acos(cos_theta) / 2.0;
    ComplexVector v(2);
    v << std::cos(half), std::polar(std::sin(half), std::numbers::pi / 4.0);
    return PureState::normalized(std::move(v));
}

/// Hermitian matrices |j><j|, then (|j><k| + |k><j|)/sqrt2, then
/// i(|j><k| - |k><j|)/sqrt2, pairs j < k in lexicographic order.
inline std::vector<HermitianOperator>
canonical_hermitian_spanning_set(std::size_t bond_dim) {
    const auto n = static_cast<Eigen::Index>(bond_dim);
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<HermitianOperator> out;
    out.reserve(bond_dim * bond_dim);
    for (Eigen::Index j = 0; j < n; ++j) {
        ComplexMatrix m = ComplexMatrix::Zero(n, n);
        m(j, j) = 1.0;
        out.emplace_back(std::move(m));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            ComplexMatrix m = ComplexMatrix::Zero(n, n);
            m(j, k) = r;
            m(k, j) = r;
            out.emplace_back(std::move(m));
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            ComplexMatrix m = ComplexMatrix::Zero(n, n);
            m(j, k) = Complex(0.0, r);
            m(k, j) = Complex(0.0, -r);
            out.emplace_back(std::move(m));
        }
    }
    return out;
}

/// Max-norm of (1/D^2) sum_k C_k (x) C_k^T - |phi_D><phi_D|.
inline double verify_decomposition(std::size_t bond_dim,
                                   std::span<const HermitianOperator> elements) {
    const auto n = static_cast<Eigen::Index>(bond_dim);
    ComplexMatrix sum = ComplexMatrix::Zero(n * n, n * n);
    for (const auto &c : elements) {
        if (c.dim() != bond_dim) {
            throw UsageError("verify_decomposition: element dimension differs "
                             "from D");
        }
        sum += kron(c.matrix(), c.matrix().transpose());
    }
    sum /= static_cast<double>(bond_dim * bond_dim);
    return max_abs_diff(sum, max_ent_state(bond_dim).projector().matrix());
}

/// Max-norm of the Gram defect tr(C_k C_l) - D delta_kl.
inline double gram_error(std::size_t bond_dim,
                         std::span<const HermitianOperator> elements) {
    double worst = 0.0;
    for (std::size_t k = 0; k < elements.size(); ++k) {
        for (std::size_t l = k; l < elements.size(); ++l) {
            const double target = k == l ? static_cast<double>(bond_dim) : 0.0;
            worst = std::max(worst,
                             std::abs(hs_inner(elements[k], elements[l]) - target));
        }
    }
    return worst;
}

struct BasisReport {
    std::size_t element_count = 0;
    double gram_error = 0.0;
    double reconstruction_error = 0.0;
    std::optional<double> min_anchor_overlap;
    std::optional<double> max_anchor_overlap;
    bool ok = false;
    std::string problem;
};

/// Checks every basis invariant without throwing.
inline BasisReport inspect_basis(std::size_t bond_dim,
                                 std::span<const HermitianOperator> elements,
                                 const std::optional<PureState> &anchor) {
    BasisReport report;
    report.element_count = elements.size();
    if (bond_dim < 2) {
        report.problem = "D must be at least 2";
        return report;
    }
    for (const auto &c : elements) {
        if (c.dim() != bond_dim) {
            report.problem = "element dimension differs from D";
            return report;
        }
    }
    report.gram_error = gram_error(bond_dim, elements);
    report.reconstruction_error = verify_decomposition(bond_dim, elements);
    if (anchor) {
        if (anchor->dim() != bond_dim) {
            report.problem = "anchor dimension differs from D";
            return report;
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto &c : elements) {
            const double overlap = anchor->expectation(c);
            lo = std::min(lo, overlap);
            hi = std::max(hi, overlap);
        }
        report.min_anchor_overlap = lo;
        report.max_anchor_overlap = hi;
    }
    if (elements.size() != bond_dim * bond_dim) {
        report.problem = "expected D^2 elements";
    } else if (report.gram_error > kGramTolerance) {
        report.problem = "elements are not orthogonal with tr(C_k C_l) = D";
    } else if (report.reconstruction_error > kDecompositionTolerance) {
        report.problem = "bond reconstruction error exceeds tolerance";
    } else if (report.min_anchor_overlap &&
               *report.min_anchor_overlap < kAnchorStrictness) {
        report.problem = "anchor overlap not strictly positive";
    } else {
        report.ok = true;
    }
    return report;
}

/// D^2 Hermitian operators of dimension D satisfying tr(C_k C_l) = D delta_kl,
/// with an optional anchor of strictly positive overlap. Immutable.
class OperatorBasis {
  public:
    OperatorBasis(std::size_t bond_dim, std::vector<HermitianOperator> elements,
                  std::optional<PureState> anchor,
                  BasisConstruction construction)
        : bond_dim_(bond_dim), elements_(std::move(elements)),
          anchor_(std::move(anchor)), construction_(construction) {
        const auto report = inspect_basis(bond_dim_, elements_, anchor_);
        if (!report.ok) {
            throw ValidationError("OperatorBasis: " + report.problem);
        }
        transposed_.reserve(elements_.size());
        for (const auto &c : elements_) {
            transposed_.push_back(c.transposed());
        }
    }

    [[nodiscard]] std::size_t bond_dim() const { return bond_dim_; }
    [[nodiscard]] std::size_t size() const { return elements_.size(); }
    [[nodiscard]] const std::vector<HermitianOperator> &elements() const {
        return elements_;
    }
    [[nodiscard]] const HermitianOperator &element(std::size_t k,
                                                   bool transposed = false) const {
        if (k >= elements_.size()) {
            throw UsageError("OperatorBasis::element: index out of range");
        }
        return transposed ? transposed_[k] : elements_[k];
    }
    [[nodiscard]] const std::optional<PureState> &anchor() const {
        return anchor_;
    }
    [[nodiscard]] BasisConstruction construction() const {
        return construction_;
    }

  private:
    std::size_t bond_dim_;
    std::vector<HermitianOperator> elements_;
    std::vector<HermitianOperator> transposed_;
    std::optional<PureState> anchor_;
    BasisConstruction construction_;
};

inline double verify_decomposition(const OperatorBasis &basis) {
    return verify_decomposition(basis.bond_dim(), basis.elements());
}

/// Which end of a bond a virtual particle sits on: heads carry C_k, tails
/// carry C_k^T.
struct VirtualSpaceTag {
    std::reference_wrapper<const OperatorBasis> basis;
    bool transposed = false;

    [[nodiscard]] const HermitianOperator &extreme_point(std::size_t k) const {
        return basis.get().element(k, transposed);
    }
};

/// Anchored basis with <phi|C_k|phi> = 1/sqrt(D) for every k.
///
/// G_1 = |phi><phi| is completed to a Hilbert-Schmidt orthonormal Hermitian
/// basis {G_l} by Gram-Schmidt over the canonical spanning set. The
/// Householder reflection R taking e_1 to the uniform unit vector then mixes
/// them, C_k = sqrt(D) sum_l R_kl G_l, so every C_k has the same anchor
/// overlap sqrt(D) R_k1 = 1/sqrt(D).
inline OperatorBasis build_aligned_basis(std::size_t bond_dim,
                                         const PureState &anchor) {
    if (bond_dim < 2) {
        throw UsageError("build_aligned_basis: D must be at least 2");
    }
    if (anchor.dim() != bond_dim) {
        throw UsageError("build_aligned_basis: anchor dimension differs from D");
    }
    const std::size_t count = bond_dim * bond_dim;

    std::vector<ComplexMatrix> ortho;
    ortho.reserve(count);
    ortho.push_back(anchor.projector().matrix());
    const auto inner = [](const ComplexMatrix &a, const ComplexMatrix &b) {
        return (a.array() * b.conjugate().array()).sum().real();
    };
    for (const auto &candidate : canonical_hermitian_spanning_set(bond_dim)) {
        if (ortho.size() == count) {
            break;
        }
        ComplexMatrix r = candidate.matrix();
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &g : ortho) {
                r -= inner(r, g) * g;
            }
        }
        const double norm = std::sqrt(inner(r, r));
        if (norm > 1e-8) {
            ortho.push_back(r / norm);
        }
    }
    if (ortho.size() != count) {
        throw ConstructionError("build_aligned_basis: Gram-Schmidt did not "
                                "reach D^2 elements");
    }

    Eigen::VectorXd w = Eigen::VectorXd::Constant(
        static_cast<Eigen::Index>(count), -1.0 / static_cast<double>(bond_dim));
    w(0) += 1.0;
    const Eigen::MatrixXd reflection =
        Eigen::MatrixXd::Identity(w.size(), w.size()) -
        2.0 * w * w.transpose() / w.squaredNorm();

    const double root_d = std::sqrt(static_cast<double>(bond_dim));
    std::vector<HermitianOperator> elements;
    elements.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        ComplexMatrix c = ComplexMatrix::Zero(static_cast<Eigen::Index>(bond_dim),
                                              static_cast<Eigen::Index>(bond_dim));
        for (std::size_t l = 0; l < count; ++l) {
            c += reflection(static_cast<Eigen::Index>(k),
                            static_cast<Eigen::Index>(l)) *
                 ortho[l];
        }
        c *= root_d;
        // Strip the round-off anti-Hermitian part left by the mixing.
        elements.emplace_back(((c + c.adjoint()) / 2.0).eval());
    }
    return OperatorBasis(bond_dim, std::move(elements), anchor,
                         BasisConstruction::aligned);
}

/// The four qubit phase point operators
/// A_ab = (I + (-1)^a sx + (-1)^(a+b) sy + (-1)^b sz)/2 in order 00,01,10,11,
/// anchored at the Bloch direction (1,1,1)/sqrt3.
inline OperatorBasis phase_point_basis() {
    ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, Complex(0, -1), Complex(0, 1), 0;
    sz << 1, 0, 0, -1;
    std::vector<HermitianOperator> elements;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double sa = a ? -1.0 : 1.0;
            const double sb = b ? -1.0 : 1.0;
            elements.emplace_back(
                ((id + sa * sx + sa * sb * sy + sb * sz) / 2.0).eval());
        }
    }
    return OperatorBasis(2, std::move(elements), plus_diag_state(),
                         BasisConstruction::phase_point);
}

} // namespace rsep
