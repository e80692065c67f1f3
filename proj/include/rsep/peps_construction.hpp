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
 * @file peps_construction.hpp
 * Single-Kraus site maps (Recipe 1, Recipe 2, identity), complete-positivity
 * checks through the Choi matrix, and exact assembly of the physical PEPS
 * vector on small lattices.
 *
 * A site map of degree v sends the v virtual D-level particles at a site,
 * ordered as in Lattice::incidence, to one d-level physical particle:
 * rho -> sum_K K rho K^dagger with K of shape d x D^v.
 */
#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"
#include "measurement_dual.hpp"
#include "operator_basis.hpp"
#include "operator_core.hpp"
#include "random.hpp"

namespace rsep {

enum class Recipe { recipe1, recipe2, identity, custom };

inline std::string_view to_string(Recipe r) {
    switch (r) {
    case Recipe::recipe1:
        return "recipe1";
    case Recipe::recipe2:
        return "recipe2";
    case Recipe::identity:
        return "identity";
    case Recipe::custom:
        return "custom";
    }
    return "custom";
}

inline std::size_t int_pow(std::size_t base, std::size_t exp) {
    std::size_t out = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        out *= base;
    }
    return out;
}

class SiteMap {
  public:
    SiteMap(std::size_t degree, std::size_t bond_dim, std::size_t phys_dim,
            std::vector<ComplexMatrix> kraus, Recipe recipe, std::string label,
            double epsilon = 0.0,
            std::optional<std::vector<PureState>> psi_y = std::nullopt)
        : degree_(degree), bond_dim_(bond_dim), phys_dim_(phys_dim),
          kraus_(std::move(kraus)), recipe_(recipe), label_(std::move(label)),
          epsilon_(epsilon), psi_y_(std::move(psi_y)) {
        if (degree_ < 1 || bond_dim_ < 2 || phys_dim_ < 1) {
            throw UsageError("SiteMap: need v >= 1, D >= 2, d >= 1");
        }
        if (kraus_.empty()) {
            throw UsageError("SiteMap: no Kraus operators");
        }
        const auto rows = static_cast<Eigen::Index>(phys_dim_);
        const auto cols = static_cast<Eigen::Index>(virtual_dim());
        for (const auto &k : kraus_) {
            if (k.rows() != rows || k.cols() != cols) {
                throw UsageError("SiteMap: Kraus operator must be d x D^v");
            }
            if (!k.allFinite()) {
                throw ValidationError("SiteMap: non-finite Kraus entry");
            }
        }
    }

    [[nodiscard]] std::size_t degree() const { return degree_; }
    [[nodiscard]] std::size_t bond_dim() const { return bond_dim_; }
    [[nodiscard]] std::size_t phys_dim() const { return phys_dim_; }
    [[nodiscard]] std::size_t virtual_dim() const {
        return int_pow(bond_dim_, degree_);
    }
    [[nodiscard]] const std::vector<ComplexMatrix> &kraus() const {
        return kraus_;
    }
    [[nodiscard]] bool single_kraus() const { return kraus_.size() == 1; }
    [[nodiscard]] Recipe recipe() const { return recipe_; }
    [[nodiscard]] const std::string &label() const { return label_; }
    [[nodiscard]] double epsilon() const { return epsilon_; }
    [[nodiscard]] const std::optional<std::vector<PureState>> &psi_y() const {
        return psi_y_;
    }

    /// sum_K K rho K^dagger.
    [[nodiscard]] ComplexMatrix apply(const ComplexMatrix &rho) const {
        ComplexMatrix out = ComplexMatrix::Zero(
            static_cast<Eigen::Index>(phys_dim_), static_cast<Eigen::Index>(phys_dim_));
        for (const auto &k : kraus_) {
            out.noalias() += k * rho * k.adjoint();
        }
        return out;
    }

  private:
    std::size_t degree_;
    std::size_t bond_dim_;
    std::size_t phys_dim_;
    std::vector<ComplexMatrix> kraus_;
    Recipe recipe_;
    std::string label_;
    double epsilon_;
    std::optional<std::vector<PureState>> psi_y_;
};

inline void require_room_for_degree(std::size_t degree, std::size_t phys_dim) {
    if (degree < 1 || degree >= 63) {
        throw UsageError("site degree out of range");
    }
    if (phys_dim < (std::size_t{1} << degree)) {
        throw ConstraintError("physical dimension d = " +
                              std::to_string(phys_dim) +
                              " is smaller than 2^v = " +
                              std::to_string(std::size_t{1} << degree) +
                              " (degree " + std::to_string(degree) + ")");
    }
}

/// |psi> followed by the computational basis vectors, Gram-Schmidt
/// orthonormalized, keeping the first @p count.
inline std::vector<PureState> default_psi_family(const PureState &psi,
                                                 std::size_t count) {
    if (count > psi.dim()) {
        throw ConstraintError("default_psi_family: cannot fit " +
                              std::to_string(count) +
                              " orthonormal states in dimension " +
                              std::to_string(psi.dim()));
    }
    std::vector<ComplexVector> basis{psi.amplitudes()};
    for (std::size_t j = 0; j < psi.dim() && basis.size() < count; ++j) {
        ComplexVector r = ComplexVector::Zero(static_cast<Eigen::Index>(psi.dim()));
        r(static_cast<Eigen::Index>(j)) = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &b : basis) {
                r -= b.dot(r) * b;
            }
        }
        if (r.norm() > 1e-8) {
            basis.push_back(r / r.norm());
        }
    }
    std::vector<PureState> out;
    for (auto &b : basis) {
        out.push_back(PureState::normalized(std::move(b)));
    }
    return out;
}

/// Q~ = sum_y eps^Ham(y) |psi_y><y| over v-bit strings y, D = 2. Virtual
/// particle 0 is the most significant bit of y.
inline SiteMap recipe2_site_map(std::size_t degree, std::size_t phys_dim,
                                std::vector<PureState> psi_y, double epsilon) {
    require_room_for_degree(degree, phys_dim);
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw UsageError("recipe2_site_map: epsilon must be a finite value >= 0");
    }
    const std::size_t strings = std::size_t{1} << degree;
    if (psi_y.size() != strings) {
        throw UsageError("recipe2_site_map: need exactly 2^v states psi_y");
    }
    for (std::size_t a = 0; a < strings; ++a) {
        if (psi_y[a].dim() != phys_dim) {
            throw UsageError("recipe2_site_map: psi_y dimension differs from d");
        }
        for (std::size_t b = a + 1; b < strings; ++b) {
            if (std::abs(psi_y[a].amplitudes().dot(psi_y[b].amplitudes())) > 1e-10) {
                throw UsageError("recipe2_site_map: psi_y are not orthonormal");
            }
        }
    }
    ComplexMatrix q = ComplexMatrix::Zero(static_cast<Eigen::Index>(phys_dim),
                                          static_cast<Eigen::Index>(strings));
    for (std::size_t y = 0; y < strings; ++y) {
        const int weight = std::popcount(static_cast<std::uint64_t>(y));
        q.col(static_cast<Eigen::Index>(y)) =
            std::pow(epsilon, weight) * psi_y[y].amplitudes();
    }
    return SiteMap(degree, 2, phys_dim, {std::move(q)}, Recipe::recipe2,
                   "recipe2", epsilon, std::move(psi_y));
}

inline SiteMap recipe2_site_map(std::size_t degree, const PureState &psi,
                                double epsilon) {
    require_room_for_degree(degree, psi.dim());
    return recipe2_site_map(degree, psi.dim(),
                            default_psi_family(psi, std::size_t{1} << degree),
                            epsilon);
}

/// Q~ = |psi><alpha| + eps P, alpha the product of the anchors and P a seeded
/// complex Gaussian matrix scaled to unit spectral norm. P is redrawn until
/// Q~ has full rank min(d, D^v).
inline SiteMap recipe1_site_map(std::size_t degree, std::size_t phys_dim,
                                const PureState &psi,
                                std::span<const PureState> anchors,
                                double epsilon, std::uint64_t seed,
                                std::uint64_t stream = 0) {
    require_room_for_degree(degree, phys_dim);
    if (psi.dim() != phys_dim) {
        throw UsageError("recipe1_site_map: psi dimension differs from d");
    }
    if (anchors.size() != degree) {
        throw UsageError("recipe1_site_map: need one anchor per virtual particle");
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw UsageError("recipe1_site_map: epsilon must be a finite value >= 0");
    }
    const std::size_t bond_dim = anchors.front().dim();
    ComplexVector alpha = ComplexVector::Ones(1);
    for (const auto &a : anchors) {
        if (a.dim() != bond_dim) {
            throw UsageError("recipe1_site_map: anchors differ in dimension");
        }
        alpha = kron(alpha, a.amplitudes());
    }
    const ComplexMatrix rank_one = psi.amplitudes() * alpha.adjoint();
    if (epsilon == 0.0) {
        return SiteMap(degree, bond_dim, phys_dim, {rank_one}, Recipe::recipe1,
                       "recipe1", epsilon);
    }
    const auto rows = static_cast<Eigen::Index>(phys_dim);
    const auto cols = alpha.size();
    const std::size_t full_rank = std::min<std::size_t>(phys_dim, cols);
    constexpr std::uint64_t kMaxRetries = 16;
    for (std::uint64_t attempt = 0; attempt < kMaxRetries; ++attempt) {
        auto engine = keyed_engine(seed, "recipe1", {stream, attempt});
        std::normal_distribution<double> normal;
        ComplexMatrix p(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                const double re = normal(engine);
                const double im = normal(engine);
                p(r, c) = Complex(re, im);
            }
        }
        Eigen::JacobiSVD<ComplexMatrix> svd(p);
        const double top = svd.singularValues()(0);
        if (!(top > 0.0)) {
            continue;
        }
        ComplexMatrix q = rank_one + (epsilon / top) * p;
        if (numerical_rank(q, 1e-12) == full_rank) {
            return SiteMap(degree, bond_dim, phys_dim, {std::move(q)},
                           Recipe::recipe1, "recipe1", epsilon);
        }
    }
    throw ConstructionError("recipe1_site_map: no full-rank perturbation after " +
                            std::to_string(kMaxRetries) + " draws");
}

/// Identity on v virtual qubits, d = 2^v.
inline SiteMap identity_site_map(std::size_t degree) {
    if (degree < 1 || degree > 16) {
        throw UsageError("identity_site_map: degree out of range");
    }
    const auto n = static_cast<Eigen::Index>(std::size_t{1} << degree);
    return SiteMap(degree, 2, static_cast<std::size_t>(n),
                   {ComplexMatrix::Identity(n, n)}, Recipe::identity, "identity");
}

/// Choi matrix sum_ij |i><j| (x) map(|i><j|) of a linear map on
/// @p in_dim x @p in_dim matrices.
inline ComplexMatrix
choi_matrix(const std::function<ComplexMatrix(const ComplexMatrix &)> &map,
            std::size_t in_dim) {
    const auto n = static_cast<Eigen::Index>(in_dim);
    ComplexMatrix out;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            ComplexMatrix unit = ComplexMatrix::Zero(n, n);
            unit(i, j) = 1.0;
            const ComplexMatrix image = map(unit);
            if (out.size() == 0) {
                out = ComplexMatrix::Zero(n * image.rows(), n * image.cols());
            }
            out.block(i * image.rows(), j * image.cols(), image.rows(),
                      image.cols()) = image;
        }
    }
    return out;
}

inline double choi_min_eigenvalue(
    const std::function<ComplexMatrix(const ComplexMatrix &)> &map,
    std::size_t in_dim) {
    return min_eigenvalue(HermitianOperator(choi_matrix(map, in_dim)));
}

/// Minimal eigenvalue of the Choi matrix of the Kraus action (no
/// transpositions); >= -1e-9 certifies complete positivity.
inline double choi_check(const SiteMap &map) {
    return choi_min_eigenvalue(
        [&map](const ComplexMatrix &rho) { return map.apply(rho); },
        map.virtual_dim());
}

inline constexpr double kChoiTolerance = 1e-9;

/// A lattice with one site map per site, a virtual basis shared by every
/// bond, and the measurement set M being simulated. Distinct site maps are
/// stored once and referenced by index.
class PepsInstance {
  public:
    PepsInstance(Lattice lattice, OperatorBasis basis, MeasurementSet mset,
                 std::vector<SiteMap> maps, std::vector<std::size_t> site_map_index)
        : lattice_(std::move(lattice)), basis_(std::move(basis)),
          mset_(std::move(mset)), maps_(std::move(maps)),
          site_map_index_(std::move(site_map_index)) {
        if (site_map_index_.size() != lattice_.n_sites()) {
            throw UsageError("PepsInstance: need one site map per site");
        }
        for (std::size_t s = 0; s < lattice_.n_sites(); ++s) {
            if (site_map_index_[s] >= maps_.size()) {
                throw UsageError("PepsInstance: site map index out of range");
            }
            const auto &m = site_map(s);
            if (m.degree() != lattice_.degree(s)) {
                throw UsageError("PepsInstance: site " + std::to_string(s) +
                                 " has degree " + std::to_string(lattice_.degree(s)) +
                                 " but its map takes v = " +
                                 std::to_string(m.degree()));
            }
            if (m.bond_dim() != basis_.bond_dim()) {
                throw UsageError("PepsInstance: site " + std::to_string(s) +
                                 " bond dimension differs from the basis");
            }
            if (m.phys_dim() != mset_.dim()) {
                throw UsageError("PepsInstance: site " + std::to_string(s) +
                                 " physical dimension " +
                                 std::to_string(m.phys_dim()) +
                                 " differs from the measurement dimension " +
                                 std::to_string(mset_.dim()));
            }
        }
    }

    [[nodiscard]] const Lattice &lattice() const { return lattice_; }
    [[nodiscard]] const OperatorBasis &basis() const { return basis_; }
    [[nodiscard]] const MeasurementSet &measurement_set() const { return mset_; }
    [[nodiscard]] const std::vector<SiteMap> &maps() const { return maps_; }
    [[nodiscard]] std::size_t n_sites() const { return lattice_.n_sites(); }
    [[nodiscard]] std::size_t phys_dim() const { return mset_.dim(); }
    [[nodiscard]] std::size_t map_index(std::size_t site) const {
        return site_map_index_.at(site);
    }
    [[nodiscard]] const SiteMap &site_map(std::size_t site) const {
        return maps_[site_map_index_.at(site)];
    }
    [[nodiscard]] std::vector<bool> transposed_flags(std::size_t site) const {
        std::vector<bool> out;
        for (const auto &inc : lattice_.incidence(site)) {
            out.push_back(inc.transposed());
        }
        return out;
    }

  private:
    Lattice lattice_;
    OperatorBasis basis_;
    MeasurementSet mset_;
    std::vector<SiteMap> maps_;
    std::vector<std::size_t> site_map_index_;
};

/// Exact physical vector (x)_s Q~_s applied to (x)_e |phi_D>; not normalized.
struct ExactState {
    ComplexVector amplitudes;
    std::vector<std::size_t> site_dims;
    /// Squared norm T of the unnormalized vector.
    double norm_squared = 0.0;

    [[nodiscard]] PureState normalized() const {
        return PureState::normalized(amplitudes);
    }
};

inline constexpr std::size_t kMaxExactDim = std::size_t{1} << 20;
inline constexpr std::size_t kMaxContractionSize = std::size_t{1} << 24;
inline constexpr double kDegenerateNorm = 1e-14;

inline ExactState assemble_exact_state(const PepsInstance &instance) {
    const auto &lat = instance.lattice();
    std::size_t total = 1;
    for (std::size_t s = 0; s < lat.n_sites(); ++s) {
        total *= instance.site_map(s).phys_dim();
        if (total > kMaxExactDim) {
            throw ConstructionError("assemble_exact_state: physical dimension "
                                    "exceeds 2^20");
        }
        if (!instance.site_map(s).single_kraus()) {
            throw UsageError("assemble_exact_state: site maps must have a "
                             "single Kraus operator");
        }
    }
    const std::size_t bond = instance.basis().bond_dim();

    // Legs of the running tensor, big-endian. Open bond legs carry the shared
    // value j of |jj> until the second endpoint is absorbed.
    struct Leg {
        bool physical;
        std::size_t id;
        std::size_t dim;
    };
    std::vector<Leg> legs;
    std::vector<Complex> data{Complex(1.0)};

    for (std::size_t s = 0; s < lat.n_sites(); ++s) {
        const auto &map = instance.site_map(s);
        const ComplexMatrix &k = map.kraus().front();
        const auto &inc = lat.incidence(s);
        const std::size_t v = inc.size();

        // Position of each incident edge among the old legs, or npos if new.
        std::vector<std::size_t> old_pos(v, std::string::npos);
        for (std::size_t j = 0; j < v; ++j) {
            for (std::size_t l = 0; l < legs.size(); ++l) {
                if (!legs[l].physical && legs[l].id == inc[j].edge) {
                    old_pos[j] = l;
                }
            }
        }
        std::vector<Leg> new_legs;
        std::vector<bool> closed(legs.size(), false);
        for (std::size_t j = 0; j < v; ++j) {
            if (old_pos[j] != std::string::npos) {
                closed[old_pos[j]] = true;
            }
        }
        for (std::size_t l = 0; l < legs.size(); ++l) {
            if (!closed[l]) {
                new_legs.push_back(legs[l]);
            }
        }
        new_legs.push_back({true, s, map.phys_dim()});
        std::vector<std::size_t> opened; // incidence positions of new edges
        for (std::size_t j = 0; j < v; ++j) {
            if (old_pos[j] == std::string::npos) {
                opened.push_back(j);
                new_legs.push_back({false, inc[j].edge, bond});
            }
        }
        std::size_t new_size = 1;
        for (const auto &l : new_legs) {
            new_size *= l.dim;
        }
        if (new_size > kMaxContractionSize) {
            throw ConstructionError("assemble_exact_state: intermediate tensor "
                                    "too large for exact assembly");
        }
        const std::size_t open_combos = int_pow(bond, opened.size());
        const std::size_t d = map.phys_dim();
        std::vector<Complex> next(new_size, Complex(0.0));

        std::vector<std::size_t> values(legs.size());
        std::vector<std::size_t> virt(v);
        for (std::size_t o = 0; o < data.size(); ++o) {
            if (data[o] == Complex(0.0)) {
                continue;
            }
            std::size_t rem = o;
            for (std::size_t l = legs.size(); l-- > 0;) {
                values[l] = rem % legs[l].dim;
                rem /= legs[l].dim;
            }
            std::size_t prefix = 0;
            for (std::size_t l = 0; l < legs.size(); ++l) {
                if (!closed[l]) {
                    prefix = prefix * legs[l].dim + values[l];
                }
            }
            for (std::size_t j = 0; j < v; ++j) {
                if (old_pos[j] != std::string::npos) {
                    virt[j] = values[old_pos[j]];
                }
            }
            for (std::size_t c = 0; c < open_combos; ++c) {
                std::size_t crem = c;
                for (std::size_t q = opened.size(); q-- > 0;) {
                    virt[opened[q]] = crem % bond;
                    crem /= bond;
                }
                std::size_t col = 0;
                for (std::size_t j = 0; j < v; ++j) {
                    col = col * bond + virt[j];
                }
                for (std::size_t p = 0; p < d; ++p) {
                    const Complex amp =
                        k(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(col));
                    if (amp == Complex(0.0)) {
                        continue;
                    }
                    next[(prefix * d + p) * open_combos + c] += data[o] * amp;
                }
            }
        }
        legs = std::move(new_legs);
        data = std::move(next);
    }

    ExactState out;
    const double scale =
        std::pow(static_cast<double>(bond), -0.5 * static_cast<double>(lat.n_edges()));
    out.amplitudes = Eigen::Map<ComplexVector>(data.data(),
                                               static_cast<Eigen::Index>(data.size())) *
                     scale;
    for (std::size_t s = 0; s < lat.n_sites(); ++s) {
        out.site_dims.push_back(instance.site_map(s).phys_dim());
    }
    out.norm_squared = out.amplitudes.squaredNorm();
    if (out.norm_squared <= kDegenerateNorm) {
        throw ConstructionError("assemble_exact_state: squared norm " +
                                std::to_string(out.norm_squared) +
                                " is degenerate");
    }
    return out;
}

/// Entanglement entropy (bits) of each single site against the rest.
inline std::vector<double> entanglement_certificate(const ExactState &state) {
    const PureState psi = state.normalized();
    std::vector<double> out;
    for (std::size_t s = 0; s < state.site_dims.size(); ++s) {
        const std::size_t cut[] = {s};
        out.push_back(entanglement_entropy(psi, state.site_dims, cut));
    }
    return out;
}

inline std::vector<double> entanglement_certificate(const PepsInstance &instance) {
    return entanglement_certificate(assemble_exact_state(instance));
}

} // namespace rsep
