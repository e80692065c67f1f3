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
 * @file rsep_decomposition.hpp
 * The separable representation of a PEPS over edge indices.
 *
 * Expanding every bond as (1/D^2) sum_k C_k (x) C_k^T gives
 *
 *     |Psi><Psi| / T = sum_lambda p(lambda) (x)_s O_s(lambda) / tr O_s(lambda),
 *     p(lambda)      = prod_s tr O_s(lambda) / (T D^(2E)),
 *
 * where lambda = (i_1..i_E) picks one basis element per edge and
 * O_s = Q~_s (x)_j C~_{i_j} Q~_s^dagger. If every tr O_s > 0 and every
 * O_s / tr O_s lies in the dual of M, the state is R-separable and M has a
 * local hidden variable model. If the trace tensors factor into per-edge
 * vectors, p(lambda) is a product of independent per-edge distributions.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "measurement_dual.hpp"
#include "operator_basis.hpp"
#include "operator_core.hpp"
#include "peps_construction.hpp"

namespace rsep {

inline constexpr double kTraceFloor = 1e-10;
inline constexpr double kFactorizationTolerance = 1e-8;

/// One basis index per lattice edge (0-based): the hidden variable.
struct EdgeAssignment {
    std::vector<std::size_t> indices;
};

/// O = Q~ ((x)_j C~_{k_j}) Q~^dagger, C~ = C^T where @p transposed is set.
inline HermitianOperator site_output_operator(const SiteMap &map,
                                              const OperatorBasis &basis,
                                              std::span<const std::size_t> tuple,
                                              const std::vector<bool> &transposed) {
    if (tuple.size() != map.degree() || transposed.size() != map.degree()) {
        throw UsageError("site_output_operator: tuple length must equal v");
    }
    if (map.bond_dim() != basis.bond_dim()) {
        throw UsageError("site_output_operator: bond dimension mismatch");
    }
    ComplexMatrix v = basis.element(tuple[0], transposed[0]).matrix();
    for (std::size_t j = 1; j < tuple.size(); ++j) {
        v = kron(v, basis.element(tuple[j], transposed[j]).matrix());
    }
    ComplexMatrix out = map.apply(v);
    return HermitianOperator(((out + out.adjoint()) / 2.0).eval());
}

/// Sites sharing a map and a head/tail pattern have identical output tables.
struct SiteClass {
    std::size_t map_index = 0;
    std::vector<bool> transposed;
    std::vector<std::size_t> sites;
};

inline std::vector<SiteClass> site_classes(const PepsInstance &instance) {
    std::map<std::pair<std::size_t, std::vector<bool>>, std::size_t> lookup;
    std::vector<SiteClass> out;
    for (std::size_t s = 0; s < instance.n_sites(); ++s) {
        auto key = std::make_pair(instance.map_index(s), instance.transposed_flags(s));
        auto [it, inserted] = lookup.try_emplace(key, out.size());
        if (inserted) {
            out.push_back({key.first, key.second, {}});
        }
        out[it->second].sites.push_back(s);
    }
    return out;
}

/// Output operators of one site over all (D^2)^v tuples, tuple index
/// big-endian in incidence order.
struct SiteOutputTable {
    std::size_t degree = 0;
    std::size_t alphabet = 0; // D^2
    std::vector<double> traces;
    std::vector<HermitianOperator> operators;

    [[nodiscard]] std::size_t size() const { return traces.size(); }

    [[nodiscard]] std::vector<std::size_t> tuple(std::size_t flat) const {
        std::vector<std::size_t> out(degree);
        for (std::size_t j = degree; j-- > 0;) {
            out[j] = flat % alphabet;
            flat /= alphabet;
        }
        return out;
    }
};

inline SiteOutputTable site_output_table(const SiteMap &map,
                                         const OperatorBasis &basis,
                                         const std::vector<bool> &transposed) {
    SiteOutputTable table;
    table.degree = map.degree();
    table.alphabet = basis.size();
    const std::size_t count = int_pow(table.alphabet, table.degree);
    table.traces.reserve(count);
    table.operators.reserve(count);
    for (std::size_t flat = 0; flat < count; ++flat) {
        auto op = site_output_operator(map, basis, table.tuple(flat), transposed);
        table.traces.push_back(op.trace());
        table.operators.push_back(std::move(op));
    }
    return table;
}

inline SiteOutputTable site_output_table(const PepsInstance &instance,
                                         std::size_t site) {
    return site_output_table(instance.site_map(site), instance.basis(),
                             instance.transposed_flags(site));
}

struct PositivityWitness {
    std::size_t site = 0;
    std::vector<std::size_t> tuple;
    /// Unset when the violation is a non-positive trace.
    std::optional<ElementRef> element;
    double value = 0.0;
};

struct PositivityReport {
    bool certified = false;
    /// min over sites, tuples and elements of min(t, 1 - t), t the overlap of
    /// the normalized output with an element of M.
    double slack = std::numeric_limits<double>::infinity();
    double min_trace = std::numeric_limits<double>::infinity();
    std::vector<double> site_min_margin;
    std::optional<PositivityWitness> witness;
};

/// (R, V)-positivity over every site and every extreme tuple: tr O >= 1e-10
/// and O / tr O in the dual of M up to 1e-9. Reports the worst offender when
/// the check fails.
inline PositivityReport rv_positivity_check(const PepsInstance &instance) {
    PositivityReport report;
    report.site_min_margin.assign(instance.n_sites(),
                                  std::numeric_limits<double>::infinity());
    const auto &mset = instance.measurement_set();
    double worst_violation = 0.0;
    for (const auto &cls : site_classes(instance)) {
        const auto &map = instance.maps()[cls.map_index];
        const std::size_t count = int_pow(instance.basis().size(), map.degree());
        double class_margin = std::numeric_limits<double>::infinity();
        SiteOutputTable shape{map.degree(), instance.basis().size(), {}, {}};
        for (std::size_t flat = 0; flat < count; ++flat) {
            const auto tuple = shape.tuple(flat);
            const auto op =
                site_output_operator(map, instance.basis(), tuple, cls.transposed);
            const double tr = op.trace();
            report.min_trace = std::min(report.min_trace, tr);
            if (tr < kTraceFloor) {
                const double violation = kTraceFloor - tr + 1.0;
                if (violation > worst_violation) {
                    worst_violation = violation;
                    report.witness = PositivityWitness{cls.sites.front(), tuple,
                                                       std::nullopt, tr};
                }
                class_margin = std::min(class_margin, tr);
                continue;
            }
            const auto margin = dual_margin(op.scaled(1.0 / tr), mset);
            class_margin = std::min(class_margin, margin.strict_margin);
            const double violation =
                std::max(-margin.min_overlap - kProbabilityTolerance,
                         margin.max_overlap - 1.0 - kProbabilityTolerance);
            if (violation > 0.0 && violation > worst_violation) {
                worst_violation = violation;
                const auto &x = mset.povm(margin.worst_element.povm)
                                    .element(margin.worst_element.element);
                report.witness = PositivityWitness{
                    cls.sites.front(), tuple, margin.worst_element,
                    hs_inner(op, x) / tr};
            }
        }
        for (std::size_t s : cls.sites) {
            report.site_min_margin[s] = class_margin;
        }
        report.slack = std::min(report.slack, class_margin);
    }
    report.certified = !report.witness.has_value();
    return report;
}

struct FactorizationResult {
    bool factorizable = false;
    /// One positive vector of length D^2 per incident edge; every vector
    /// after the first has unit maximum entry.
    std::vector<std::vector<double>> factors;
    /// Max relative error of the factor product against the traces.
    double residual = 0.0;
    std::string reason;
};

/// Rank-1 factorization of an order-v positive tensor with @p alphabet
/// entries per axis, by successive unfoldings and best rank-1 SVD
/// approximations.
inline FactorizationResult trace_factorization(std::span<const double> traces,
                                               std::size_t degree,
                                               std::size_t alphabet) {
    if (degree < 1 || alphabet < 1 || traces.size() != int_pow(alphabet, degree)) {
        throw UsageError("trace_factorization: table size must be alphabet^v");
    }
    for (double t : traces) {
        if (!(t > 0.0)) {
            throw UsageError("trace_factorization: non-positive trace " +
                             std::to_string(t));
        }
    }
    FactorizationResult result;
    std::vector<double> remaining(traces.begin(), traces.end());
    for (std::size_t axis = 0; axis + 1 < degree; ++axis) {
        const auto rows = static_cast<Eigen::Index>(alphabet);
        const auto cols = static_cast<Eigen::Index>(remaining.size() / alphabet);
        const Eigen::MatrixXd unfolded =
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>(remaining.data(), rows,
                                                             cols);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(unfolded, Eigen::ComputeThinU |
                                                            Eigen::ComputeThinV);
        Eigen::VectorXd u = svd.matrixU().col(0);
        Eigen::VectorXd w = svd.singularValues()(0) * svd.matrixV().col(0);
        if (u.sum() < 0.0) {
            u = -u;
            w = -w;
        }
        result.factors.emplace_back(u.data(), u.data() + u.size());
        remaining.assign(w.data(), w.data() + w.size());
    }
    result.factors.push_back(remaining);

    for (std::size_t j = 1; j < result.factors.size(); ++j) {
        auto &f = result.factors[j];
        const double top = *std::max_element(f.begin(), f.end());
        if (top > 0.0) {
            for (double &x : f) {
                x /= top;
            }
            for (double &x : result.factors.front()) {
                x *= top;
            }
        }
    }
    for (std::size_t flat = 0; flat < traces.size(); ++flat) {
        std::size_t rem = flat;
        double prod = 1.0;
        for (std::size_t j = degree; j-- > 0;) {
            prod *= result.factors[j][rem % alphabet];
            rem /= alphabet;
        }
        result.residual =
            std::max(result.residual, std::abs(prod - traces[flat]) / traces[flat]);
    }
    bool positive = true;
    for (const auto &f : result.factors) {
        for (double x : f) {
            positive = positive && x > 0.0;
        }
    }
    if (result.residual > kFactorizationTolerance) {
        result.reason = "trace tensor is not rank one (relative residual " +
                        std::to_string(result.residual) + ")";
    } else if (!positive) {
        result.reason = "factor vectors are not strictly positive";
    } else {
        result.factorizable = true;
    }
    return result;
}

inline FactorizationResult trace_factorization(const SiteOutputTable &table) {
    return trace_factorization(table.traces, table.degree, table.alphabet);
}

/// Independent per-edge categorical distributions over basis indices.
struct EdgeDistribution {
    std::vector<std::vector<double>> probabilities;
    /// Per-site factor vectors in incidence order.
    std::vector<std::vector<std::vector<double>>> site_factors;
    /// T = prod_e Z_e / D^(2E), Z_e = sum_k u_head(k) u_tail(k).
    double norm_squared = 0.0;
    double log_norm_squared = 0.0;
};

inline EdgeDistribution edge_distribution(const PepsInstance &instance) {
    const auto &lat = instance.lattice();
    EdgeDistribution out;
    out.site_factors.resize(instance.n_sites());
    for (const auto &cls : site_classes(instance)) {
        const auto table = site_output_table(instance.maps()[cls.map_index],
                                             instance.basis(), cls.transposed);
        for (double t : table.traces) {
            if (!(t >= kTraceFloor)) {
                throw PositivityViolation(
                    "edge_distribution: site " + std::to_string(cls.sites.front()) +
                    " has an output trace " + std::to_string(t) +
                    " below the positivity floor");
            }
        }
        auto fact = trace_factorization(table);
        if (!fact.factorizable) {
            throw UnsupportedInstance("edge_distribution: site " +
                                      std::to_string(cls.sites.front()) + ": " +
                                      fact.reason);
        }
        for (std::size_t s : cls.sites) {
            out.site_factors[s] = fact.factors;
        }
    }
    // Factor of edge e at site s sits at the edge's incidence position.
    std::vector<std::array<const std::vector<double> *, 2>> ends(lat.n_edges());
    for (std::size_t s = 0; s < lat.n_sites(); ++s) {
        const auto &inc = lat.incidence(s);
        for (std::size_t j = 0; j < inc.size(); ++j) {
            ends[inc[j].edge][inc[j].is_head ? 0 : 1] = &out.site_factors[s][j];
        }
    }
    const double bond = static_cast<double>(instance.basis().bond_dim());
    out.log_norm_squared =
        -2.0 * static_cast<double>(lat.n_edges()) * std::log(bond);
    for (std::size_t e = 0; e < lat.n_edges(); ++e) {
        const auto &head = *ends[e][0];
        const auto &tail = *ends[e][1];
        std::vector<double> p(head.size());
        double z = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            p[k] = head[k] * tail[k];
            z += p[k];
        }
        for (double &x : p) {
            x /= z;
        }
        out.log_norm_squared += std::log(z);
        out.probabilities.push_back(std::move(p));
    }
    out.norm_squared = std::exp(out.log_norm_squared);
    return out;
}

inline constexpr std::size_t kMaxMixtureTerms = std::size_t{1} << 16;
inline constexpr std::size_t kMaxMixtureDim = std::size_t{1} << 12;

/// Calls @p visit(lambda_flat, per-site tuple indices) for every edge
/// assignment, lambda big-endian over edges.
template <typename Visit>
void for_each_assignment(const PepsInstance &instance, Visit &&visit) {
    const auto &lat = instance.lattice();
    const std::size_t alphabet = instance.basis().size();
    std::size_t terms = 1;
    for (std::size_t e = 0; e < lat.n_edges(); ++e) {
        terms *= alphabet;
        if (terms > kMaxMixtureTerms) {
            throw ConstructionError("edge-assignment enumeration exceeds 2^16 "
                                    "terms");
        }
    }
    std::vector<std::size_t> lambda(lat.n_edges());
    std::vector<std::size_t> site_tuple(lat.n_sites());
    for (std::size_t flat = 0; flat < terms; ++flat) {
        std::size_t rem = flat;
        for (std::size_t e = lat.n_edges(); e-- > 0;) {
            lambda[e] = rem % alphabet;
            rem /= alphabet;
        }
        for (std::size_t s = 0; s < lat.n_sites(); ++s) {
            std::size_t t = 0;
            for (const auto &inc : lat.incidence(s)) {
                t = t * alphabet + lambda[inc.edge];
            }
            site_tuple[s] = t;
        }
        visit(lambda, site_tuple);
    }
}

/// Edge-assignment weights computed by brute force over all lambda and
/// normalized by @p norm_squared.
inline std::vector<double> assignment_weights(const PepsInstance &instance,
                                              double norm_squared) {
    std::vector<SiteOutputTable> tables;
    for (std::size_t s = 0; s < instance.n_sites(); ++s) {
        tables.push_back(site_output_table(instance, s));
    }
    const double scale =
        std::pow(static_cast<double>(instance.basis().bond_dim()),
                 -2.0 * static_cast<double>(instance.lattice().n_edges())) /
        norm_squared;
    std::vector<double> out;
    for_each_assignment(instance, [&](const auto &, const auto &tuples) {
        double w = scale;
        for (std::size_t s = 0; s < tuples.size(); ++s) {
            w *= tables[s].traces[tuples[s]];
        }
        out.push_back(w);
    });
    return out;
}

struct MixtureResult {
    HermitianOperator density;
    double weight_sum = 0.0;
    /// Squared norm of the assembled state used to normalize the weights.
    double norm_squared = 0.0;
    std::size_t terms = 0;
};

/// sum_lambda p(lambda) (x)_s O_s / tr O_s by enumeration, with T taken from
/// the exactly assembled state.
inline MixtureResult reconstruct_mixture(const PepsInstance &instance) {
    std::size_t dim = 1;
    for (std::size_t s = 0; s < instance.n_sites(); ++s) {
        dim *= instance.phys_dim();
        if (dim > kMaxMixtureDim) {
            throw ConstructionError("reconstruct_mixture: physical dimension "
                                    "exceeds 2^12");
        }
    }
    const auto exact = assemble_exact_state(instance);
    std::vector<SiteOutputTable> tables;
    for (std::size_t s = 0; s < instance.n_sites(); ++s) {
        tables.push_back(site_output_table(instance, s));
        for (double t : tables.back().traces) {
            if (!(t >= kTraceFloor)) {
                throw PositivityViolation("reconstruct_mixture: non-positive "
                                          "output trace at site " +
                                          std::to_string(s));
            }
        }
    }
    const double scale =
        std::pow(static_cast<double>(instance.basis().bond_dim()),
                 -2.0 * static_cast<double>(instance.lattice().n_edges())) /
        exact.norm_squared;
    const auto d = static_cast<Eigen::Index>(dim);
    ComplexMatrix rho = ComplexMatrix::Zero(d, d);
    MixtureResult out;
    out.norm_squared = exact.norm_squared;
    for_each_assignment(instance, [&](const auto &, const auto &tuples) {
        double w = scale;
        ComplexMatrix prod = ComplexMatrix::Ones(1, 1);
        for (std::size_t s = 0; s < tuples.size(); ++s) {
            const double tr = tables[s].traces[tuples[s]];
            w *= tr;
            prod = kron(prod, tables[s].operators[tuples[s]].matrix() / tr);
        }
        rho += w * prod;
        out.weight_sum += w;
        ++out.terms;
    });
    out.density = HermitianOperator(((rho + rho.adjoint()) / 2.0).eval());
    return out;
}

struct EpsilonBracket {
    double low = 0.0;
    /// +infinity when no failure was found up to eps_hi.
    double high = std::numeric_limits<double>::infinity();
    bool low_verified = false;
    bool high_verified = false;
    std::size_t evaluations = 0;

    [[nodiscard]] bool bounded() const { return std::isfinite(high); }
    [[nodiscard]] double width() const { return high - low; }
};

struct EpsilonSearchOptions {
    std::size_t coarse_steps = 32;
    double target_width = 1e-4;
};

/// Largest epsilon for which the instance family stays positivity-certified:
/// coarse upward scan to the first failure, then bisection. Both bracket ends
/// are re-checked, since only continuity (not monotonicity) is guaranteed.
inline EpsilonBracket
max_epsilon_search(const std::function<PepsInstance(double)> &family,
                   double eps_hi, EpsilonSearchOptions options = {}) {
    if (!(eps_hi > 0.0) || options.coarse_steps < 1 || !(options.target_width > 0.0)) {
        throw UsageError("max_epsilon_search: need eps_hi > 0");
    }
    EpsilonBracket out;
    const auto passes = [&](double eps) {
        ++out.evaluations;
        return rv_positivity_check(family(eps)).certified;
    };
    if (!passes(0.0)) {
        throw UsageError("max_epsilon_search: the epsilon = 0 instance is not "
                         "positivity-certified");
    }
    double low = 0.0;
    double high = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= options.coarse_steps; ++i) {
        const double eps =
            eps_hi * static_cast<double>(i) / static_cast<double>(options.coarse_steps);
        if (passes(eps)) {
            low = eps;
        } else {
            high = eps;
            break;
        }
    }
    if (!std::isfinite(high)) {
        out.low = eps_hi;
        out.low_verified = true;
        return out;
    }
    while (high - low > options.target_width) {
        const double mid = 0.5 * (low + high);
        (passes(mid) ? low : high) = mid;
    }
    out.low = low;
    out.high = high;
    out.low_verified = passes(low);
    out.high_verified = !passes(high);
    return out;
}

} // namespace rsep
