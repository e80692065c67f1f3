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
 * @file measurement_dual.hpp
 * Restricted measurement sets M, the dual R of operators giving valid
 * probabilities for every element of M, and admissibility of a POVM against
 * products of generalized virtual state spaces.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "operator_basis.hpp"
#include "operator_core.hpp"

namespace rsep {

inline constexpr double kPsdTolerance = 1e-9;
inline constexpr double kCompletenessTolerance = 1e-9;
inline constexpr double kProbabilityTolerance = 1e-9;
/// Declared strictly interior iff the strict margin is at least this.
inline constexpr double kStrictMargin = 1e-8;

/// A full POVM: PSD elements summing to the identity.
class Povm {
  public:
    Povm(std::string label, std::vector<HermitianOperator> elements)
        : label_(std::move(label)), elements_(std::move(elements)) {
        if (elements_.empty()) {
            throw UsageError("Povm '" + label_ + "': no elements");
        }
        const std::size_t d = elements_.front().dim();
        ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(d),
                                                static_cast<Eigen::Index>(d));
        for (std::size_t j = 0; j < elements_.size(); ++j) {
            if (elements_[j].dim() != d) {
                throw UsageError("Povm '" + label_ +
                                 "': elements differ in dimension");
            }
            if (min_eigenvalue(elements_[j]) < -kPsdTolerance) {
                throw ValidationError("Povm '" + label_ + "': element " +
                                      std::to_string(j) + " is not PSD");
            }
            sum += elements_[j].matrix();
        }
        const double defect = max_abs_diff(
            sum, ComplexMatrix::Identity(sum.rows(), sum.cols()));
        if (defect > kCompletenessTolerance) {
            throw ValidationError("Povm '" + label_ +
                                  "': elements do not sum to identity (defect " +
                                  std::to_string(defect) + ")");
        }
    }

    [[nodiscard]] const std::string &label() const { return label_; }
    [[nodiscard]] std::size_t dim() const { return elements_.front().dim(); }
    [[nodiscard]] std::size_t size() const { return elements_.size(); }
    [[nodiscard]] const std::vector<HermitianOperator> &elements() const {
        return elements_;
    }
    [[nodiscard]] const HermitianOperator &element(std::size_t j) const {
        return elements_.at(j);
    }

  private:
    std::string label_;
    std::vector<HermitianOperator> elements_;
};

class MeasurementSet {
  public:
    explicit MeasurementSet(std::vector<Povm> povms) : povms_(std::move(povms)) {
        if (povms_.empty()) {
            throw UsageError("MeasurementSet: no POVMs");
        }
        for (const auto &p : povms_) {
            if (p.dim() != povms_.front().dim()) {
                throw UsageError("MeasurementSet: POVM '" + p.label() +
                                 "' differs in dimension");
            }
        }
    }

    [[nodiscard]] std::size_t dim() const { return povms_.front().dim(); }
    [[nodiscard]] std::size_t size() const { return povms_.size(); }
    [[nodiscard]] const std::vector<Povm> &povms() const { return povms_; }
    [[nodiscard]] const Povm &povm(std::size_t i) const { return povms_.at(i); }

    [[nodiscard]] std::optional<std::size_t> find(std::string_view label) const {
        for (std::size_t i = 0; i < povms_.size(); ++i) {
            if (povms_[i].label() == label) {
                return i;
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] std::size_t element_count() const {
        std::size_t n = 0;
        for (const auto &p : povms_) {
            n += p.size();
        }
        return n;
    }

  private:
    std::vector<Povm> povms_;
};

struct ElementRef {
    std::size_t povm = 0;
    std::size_t element = 0;
};

/// Extremes of tr(O X) over all elements of a measurement set.
struct DualMargin {
    double min_overlap = 0.0;
    double max_overlap = 0.0;
    /// min over elements of min(tr(OX), 1 - tr(OX)).
    double strict_margin = 0.0;
    /// Element attaining the strict margin.
    ElementRef worst_element;

    [[nodiscard]] bool in_dual(double tolerance = 0.0) const {
        return min_overlap >= -tolerance && max_overlap <= 1.0 + tolerance;
    }
    [[nodiscard]] bool strict() const { return strict_margin >= kStrictMargin; }
};

inline DualMargin dual_margin(const HermitianOperator &op,
                              const MeasurementSet &mset) {
    if (op.dim() != mset.dim()) {
        throw UsageError("dual_margin: operator dimension " +
                         std::to_string(op.dim()) +
                         " differs from measurement dimension " +
                         std::to_string(mset.dim()));
    }
    DualMargin out;
    out.min_overlap = std::numeric_limits<double>::infinity();
    out.max_overlap = -out.min_overlap;
    out.strict_margin = out.min_overlap;
    for (std::size_t i = 0; i < mset.size(); ++i) {
        const auto &povm = mset.povm(i);
        for (std::size_t j = 0; j < povm.size(); ++j) {
            const double t = hs_inner(op, povm.element(j));
            out.min_overlap = std::min(out.min_overlap, t);
            out.max_overlap = std::max(out.max_overlap, t);
            const double slack = std::min(t, 1.0 - t);
            if (slack < out.strict_margin) {
                out.strict_margin = slack;
                out.worst_element = {i, j};
            }
        }
    }
    return out;
}

namespace detail {

inline std::vector<ComplexVector> pauli_eigenbasis(char axis) {
    const double r = 1.0 / std::sqrt(2.0);
    ComplexVector plus(2), minus(2);
    switch (axis) {
    case 'X':
        plus << r, r;
        minus << r, -r;
        break;
    case 'Y':
        plus << r, Complex(0, r);
        minus << r, Complex(0, -r);
        break;
    case 'Z':
        plus << 1, 0;
        minus << 0, 1;
        break;
    default:
        throw UsageError("unknown Pauli axis");
    }
    return {plus, minus};
}

} // namespace detail

/// All 3^n product bases of single-qubit X/Y/Z eigenprojectors. POVM labels
/// are axis strings ("XZ"); element j has qubit 0 as the most significant bit,
/// bit 0 selecting the +1 eigenvector.
inline MeasurementSet pauli_product_measurements(std::size_t n_qubits) {
    if (n_qubits < 1) {
        throw UsageError("pauli_product_measurements: need at least one qubit");
    }
    constexpr std::string_view axes = "XYZ";
    std::size_t count = 1;
    for (std::size_t q = 0; q < n_qubits; ++q) {
        count *= 3;
    }
    std::vector<Povm> povms;
    povms.reserve(count);
    for (std::size_t code = 0; code < count; ++code) {
        std::string label(n_qubits, 'X');
        std::size_t rem = code;
        for (std::size_t q = n_qubits; q-- > 0;) {
            label[q] = axes[rem % 3];
            rem /= 3;
        }
        const std::size_t outcomes = std::size_t{1} << n_qubits;
        std::vector<HermitianOperator> elements;
        elements.reserve(outcomes);
        for (std::size_t j = 0; j < outcomes; ++j) {
            ComplexVector v = ComplexVector::Ones(1);
            for (std::size_t q = 0; q < n_qubits; ++q) {
                const std::size_t bit = (j >> (n_qubits - 1 - q)) & 1U;
                v = kron(v, detail::pauli_eigenbasis(label[q])[bit]);
            }
            elements.emplace_back((v * v.adjoint()).eval());
        }
        povms.emplace_back(label, std::move(elements));
    }
    return MeasurementSet(std::move(povms));
}

/// Each element X replaced by eta X + (1 - eta) tr(X)/d I.
inline MeasurementSet noisy(const MeasurementSet &mset, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw UsageError("noisy: eta must lie in [0, 1]");
    }
    const auto d = static_cast<Eigen::Index>(mset.dim());
    std::vector<Povm> povms;
    for (const auto &p : mset.povms()) {
        std::vector<HermitianOperator> elements;
        for (const auto &x : p.elements()) {
            elements.emplace_back(
                (eta * x.matrix() + (1.0 - eta) * x.trace() /
                                        static_cast<double>(d) *
                                        ComplexMatrix::Identity(d, d))
                    .eval());
        }
        povms.emplace_back(p.label(), std::move(elements));
    }
    return MeasurementSet(std::move(povms));
}

/// Projectors onto Phi+, Phi-, Psi+, Psi- on two qubits.
inline Povm bell_povm() {
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<ComplexVector> states(4, ComplexVector::Zero(4));
    states[0] << r, 0, 0, r;
    states[1] << r, 0, 0, -r;
    states[2] << 0, r, r, 0;
    states[3] << 0, r, -r, 0;
    std::vector<HermitianOperator> elements;
    for (const auto &s : states) {
        elements.emplace_back((s * s.adjoint()).eval());
    }
    return Povm("bell", std::move(elements));
}

inline MeasurementSet merge(const MeasurementSet &a, const MeasurementSet &b) {
    std::vector<Povm> povms = a.povms();
    povms.insert(povms.end(), b.povms().begin(), b.povms().end());
    return MeasurementSet(std::move(povms));
}

/// Built-in families: "pauli:n", "noisy-pauli:n:eta", "bell", joined by '+'.
inline MeasurementSet measurement_set_from_name(std::string_view name) {
    if (const auto plus = name.find('+'); plus != std::string_view::npos) {
        return merge(measurement_set_from_name(name.substr(0, plus)),
                     measurement_set_from_name(name.substr(plus + 1)));
    }
    const auto parse_count = [&](std::string_view s) {
        std::size_t pos = 0;
        const std::string text(s);
        const unsigned long v = std::stoul(text, &pos);
        if (pos != text.size() || v < 1 || v > 8) {
            throw UsageError("bad qubit count in measurement set '" +
                             std::string(name) + "'");
        }
        return static_cast<std::size_t>(v);
    };
    try {
        if (name == "bell") {
            return MeasurementSet({bell_povm()});
        }
        if (name.starts_with("pauli:")) {
            return pauli_product_measurements(parse_count(name.substr(6)));
        }
        if (name.starts_with("noisy-pauli:")) {
            const auto rest = name.substr(12);
            const auto colon = rest.find(':');
            if (colon == std::string_view::npos) {
                throw UsageError("noisy-pauli needs n:eta");
            }
            const double eta = std::stod(std::string(rest.substr(colon + 1)));
            return noisy(pauli_product_measurements(parse_count(rest.substr(0, colon))),
                         eta);
        }
    } catch (const std::logic_error &e) {
        if (dynamic_cast<const UsageError *>(&e) != nullptr) {
            throw;
        }
        throw UsageError("malformed measurement set name '" +
                         std::string(name) + "'");
    }
    throw UsageError("unknown measurement set '" + std::string(name) + "'");
}

struct AdmissibilityWitness {
    std::vector<std::size_t> tuple;
    std::size_t element = 0;
    double value = 0.0;
};

struct AdmissibilityReport {
    double min_value = 0.0;
    double max_value = 0.0;
    std::size_t values_checked = 0;
    bool admissible = false;
    /// The (tuple, element) pair with the least slack min(t, 1 - t).
    AdmissibilityWitness witness;
};

/// Checks tr(V X) in [0, 1] for every element X and every product of extreme
/// points V = (x)_j C~_{k_j}. tr(V X) is linear in each factor, so the
/// extreme points cover the whole product of convex hulls.
inline AdmissibilityReport
admissible_povm(const Povm &povm, std::span<const VirtualSpaceTag> spaces) {
    if (spaces.empty()) {
        throw UsageError("admissible_povm: no virtual spaces");
    }
    std::size_t dim = 1;
    std::size_t tuples = 1;
    for (const auto &s : spaces) {
        dim *= s.basis.get().bond_dim();
        tuples *= s.basis.get().size();
    }
    if (dim != povm.dim()) {
        throw UsageError("admissible_povm: POVM dimension " +
                         std::to_string(povm.dim()) +
                         " differs from virtual dimension " +
                         std::to_string(dim));
    }
    AdmissibilityReport report;
    report.min_value = std::numeric_limits<double>::infinity();
    report.max_value = -report.min_value;
    double worst_slack = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> tuple(spaces.size(), 0);
    for (std::size_t flat = 0; flat < tuples; ++flat) {
        std::size_t rem = flat;
        for (std::size_t j = spaces.size(); j-- > 0;) {
            const std::size_t n = spaces[j].basis.get().size();
            tuple[j] = rem % n;
            rem /= n;
        }
        ComplexMatrix v = spaces[0].extreme_point(tuple[0]).matrix();
        for (std::size_t j = 1; j < spaces.size(); ++j) {
            v = kron(v, spaces[j].extreme_point(tuple[j]).matrix());
        }
        const HermitianOperator op(std::move(v));
        for (std::size_t e = 0; e < povm.size(); ++e) {
            const double t = hs_inner(op, povm.element(e));
            ++report.values_checked;
            report.min_value = std::min(report.min_value, t);
            report.max_value = std::max(report.max_value, t);
            const double slack = std::min(t, 1.0 - t);
            if (slack < worst_slack) {
                worst_slack = slack;
                report.witness = {tuple, e, t};
            }
        }
    }
    report.admissible = report.min_value >= -kProbabilityTolerance &&
                        report.max_value <= 1.0 + kProbabilityTolerance;
    return report;
}

} // namespace rsep
