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
 * @file instance_config.hpp
 * Instance files: a lattice, a virtual basis, a measurement set, the interior
 * state psi and the site-map recipe(s), each either inline, a built-in name,
 * or a path to a JSON file (resolved relative to the instance file).
 *
 *   {
 *     "lattice": "cycle:4",
 *     "basis": "aligned:2:zero",
 *     "measurement_set": "pauli:2",
 *     "psi": "diag:2",
 *     "site_maps": {"recipe": 2, "epsilon": 0.2, "seed": 0}
 *   }
 *
 * "site_maps" is one spec for every site or a list with one spec per site.
 * "recipe" is 1, 2 or "identity".
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "measurement_dual.hpp"
#include "operator_basis.hpp"
#include "peps_construction.hpp"

namespace rsep {

namespace detail {

inline bool looks_like_path(const std::string &s) {
    return s.ends_with(".json");
}

inline std::size_t parse_count(const std::string &text, const std::string &what) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(text, &pos);
    } catch (const std::exception &) {
        pos = std::string::npos;
    }
    if (text.empty() || pos != text.size()) {
        throw UsageError("malformed " + what + " '" + text + "'");
    }
    return static_cast<std::size_t>(v);
}

inline std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

} // namespace detail

/// "zero:d", "uniform:d", "plus-diag", "diag:n" (n copies of plus-diag),
/// or a state literal.
inline PureState state_from_spec(const json &ref) {
    if (ref.is_object()) {
        return state_from_json(ref, true);
    }
    if (!ref.is_string()) {
        throw UsageError("state spec must be a string or a state literal");
    }
    const auto text = ref.get<std::string>();
    const auto parts = detail::split(text, ':');
    if (parts[0] == "plus-diag" && parts.size() == 1) {
        return plus_diag_state();
    }
    if (parts.size() == 2) {
        const auto n = detail::parse_count(parts[1], "state spec");
        if (n < 1 || n > (std::size_t{1} << 20)) {
            throw UsageError("state spec '" + text + "' out of range");
        }
        if (parts[0] == "zero") {
            return PureState::basis_state(n, 0);
        }
        if (parts[0] == "uniform") {
            return PureState::normalized(ComplexVector::Ones(static_cast<Eigen::Index>(n)));
        }
        if (parts[0] == "diag") {
            if (n > 16) {
                throw UsageError("state spec '" + text + "' out of range");
            }
            ComplexVector v = ComplexVector::Ones(1);
            for (std::size_t q = 0; q < n; ++q) {
                v = kron(v, plus_diag_state().amplitudes());
            }
            return PureState::normalized(std::move(v));
        }
    }
    throw UsageError("unknown state spec '" + text + "'");
}

/// Anchor names for basis generation: "zero", "plus-diag" (D = 2), "uniform".
inline PureState anchor_from_name(const std::string &name, std::size_t bond_dim) {
    if (name == "zero") {
        return PureState::basis_state(bond_dim, 0);
    }
    if (name == "uniform") {
        return PureState::normalized(
            ComplexVector::Ones(static_cast<Eigen::Index>(bond_dim)));
    }
    if (name == "plus-diag") {
        if (bond_dim != 2) {
            throw UsageError("anchor 'plus-diag' needs D = 2");
        }
        return plus_diag_state();
    }
    throw UsageError("unknown anchor '" + name + "'");
}

inline Lattice resolve_lattice(const json &ref, const std::filesystem::path &base) {
    if (ref.is_object()) {
        return lattice_from_json(ref);
    }
    if (ref.is_string()) {
        const auto text = ref.get<std::string>();
        if (detail::looks_like_path(text)) {
            return lattice_from_json(read_json_file(base / text));
        }
        return lattice_from_spec(text);
    }
    throw UsageError("lattice reference must be a string or an object");
}

/// "aligned:D:anchor", "phase_point", a basis file path or an inline basis.
inline OperatorBasis resolve_basis(const json &ref, const std::filesystem::path &base) {
    if (ref.is_object()) {
        return basis_from_json(ref);
    }
    if (!ref.is_string()) {
        throw UsageError("basis reference must be a string or an object");
    }
    const auto text = ref.get<std::string>();
    if (detail::looks_like_path(text)) {
        return basis_from_json(read_json_file(base / text));
    }
    if (text == "phase_point" || text == "phase-point") {
        return phase_point_basis();
    }
    const auto parts = detail::split(text, ':');
    if (parts.size() == 3 && parts[0] == "aligned") {
        const auto bond_dim = detail::parse_count(parts[1], "basis spec");
        if (bond_dim < 2 || bond_dim > 16) {
            throw UsageError("basis spec '" + text + "': D out of range");
        }
        return build_aligned_basis(bond_dim, anchor_from_name(parts[2], bond_dim));
    }
    throw UsageError("unknown basis spec '" + text + "'");
}

inline MeasurementSet resolve_measurement_set(const json &ref,
                                              const std::filesystem::path &base) {
    if (ref.is_object()) {
        return measurement_set_from_json(ref);
    }
    if (ref.is_string()) {
        const auto text = ref.get<std::string>();
        if (detail::looks_like_path(text)) {
            return measurement_set_from_json(read_json_file(base / text));
        }
        return measurement_set_from_name(text);
    }
    throw UsageError("measurement set reference must be a string or an object");
}

struct SiteMapSpec {
    Recipe recipe = Recipe::recipe2;
    double epsilon = 0.0;
    std::uint64_t seed = 0;

    friend auto operator<=>(const SiteMapSpec &, const SiteMapSpec &) = default;
};

inline SiteMapSpec site_map_spec_from_json(const json &j) {
    try {
        SiteMapSpec spec;
        const auto &r = j.at("recipe");
        if (r.is_number_integer() && r.get<int>() == 1) {
            spec.recipe = Recipe::recipe1;
        } else if (r.is_number_integer() && r.get<int>() == 2) {
            spec.recipe = Recipe::recipe2;
        } else if (r.is_string() && r.get<std::string>() == "identity") {
            spec.recipe = Recipe::identity;
        } else {
            throw UsageError("site map: recipe must be 1, 2 or \"identity\"");
        }
        spec.epsilon = j.value("epsilon", 0.0);
        spec.seed = j.value("seed", std::uint64_t{0});
        return spec;
    } catch (const json::exception &e) {
        throw ValidationError(std::string("site map spec: ") + e.what());
    }
}

inline json site_map_spec_to_json(const SiteMapSpec &spec) {
    json j;
    switch (spec.recipe) {
    case Recipe::recipe1:
        j["recipe"] = 1;
        break;
    case Recipe::recipe2:
        j["recipe"] = 2;
        break;
    default:
        j["recipe"] = "identity";
        break;
    }
    j["epsilon"] = spec.epsilon;
    j["seed"] = spec.seed;
    return j;
}

/// An instance description plus the directory its file references resolve
/// against.
struct InstanceConfig {
    json document;
    std::filesystem::path base_dir = ".";

    static InstanceConfig load(const std::filesystem::path &path) {
        return {read_json_file(path), path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path()};
    }

    /// Copy with every site map's epsilon replaced.
    [[nodiscard]] InstanceConfig with_epsilon(double epsilon) const {
        InstanceConfig out = *this;
        auto &maps = out.document.at("site_maps");
        if (maps.is_array()) {
            for (auto &m : maps) {
                m["epsilon"] = epsilon;
            }
        } else {
            maps["epsilon"] = epsilon;
        }
        return out;
    }

    /// Copy with the lattice replaced.
    [[nodiscard]] InstanceConfig with_lattice(const json &lattice) const {
        InstanceConfig out = *this;
        out.document["lattice"] = lattice;
        return out;
    }
};

/// Resolves every reference and builds the site maps. Recipe 1 and 2 sites
/// require psi strictly inside the dual of M; sites with equal specs,
/// degree and (recipe 1 only) leg orientations share one map.
inline PepsInstance build_instance(const InstanceConfig &config) {
    const auto &doc = config.document;
    if (!doc.is_object()) {
        throw ValidationError("instance: document must be a JSON object");
    }
    for (const char *key : {"lattice", "basis", "measurement_set", "site_maps"}) {
        if (!doc.contains(key)) {
            throw ValidationError(std::string("instance: missing '") + key + "'");
        }
    }
    auto lattice = resolve_lattice(doc.at("lattice"), config.base_dir);
    auto basis = resolve_basis(doc.at("basis"), config.base_dir);
    auto mset = resolve_measurement_set(doc.at("measurement_set"), config.base_dir);
    const std::size_t d = mset.dim();

    std::vector<SiteMapSpec> specs;
    const auto &maps_json = doc.at("site_maps");
    if (maps_json.is_array()) {
        if (maps_json.size() != lattice.n_sites()) {
            throw ValidationError("instance: site_maps list must have one entry "
                                  "per site");
        }
        for (const auto &m : maps_json) {
            specs.push_back(site_map_spec_from_json(m));
        }
    } else {
        specs.assign(lattice.n_sites(), site_map_spec_from_json(maps_json));
    }

    std::optional<PureState> psi;
    const auto needs_psi = [&] {
        for (const auto &s : specs) {
            if (s.recipe != Recipe::identity) {
                return true;
            }
        }
        return false;
    }();
    if (needs_psi) {
        if (!doc.contains("psi")) {
            throw ValidationError("instance: recipes 1 and 2 need 'psi'");
        }
        psi = state_from_spec(doc.at("psi"));
        if (psi->dim() != d) {
            throw UsageError("instance: psi dimension " + std::to_string(psi->dim()) +
                             " differs from the measurement dimension " +
                             std::to_string(d));
        }
        const auto margin = dual_margin(psi->projector(), mset);
        if (!margin.strict()) {
            throw ConstraintError("instance: psi is not strictly inside the dual "
                                  "of the measurement set (margin " +
                                  std::to_string(margin.strict_margin) + ")");
        }
    }

    std::map<std::tuple<SiteMapSpec, std::size_t, std::vector<bool>>, std::size_t>
        lookup;
    std::vector<SiteMap> maps;
    std::vector<std::size_t> index;
    for (std::size_t s = 0; s < lattice.n_sites(); ++s) {
        const auto &spec = specs[s];
        const std::size_t v = lattice.degree(s);
        // recipe 1 anchors depend on leg orientation
        std::vector<bool> flags;
        if (spec.recipe == Recipe::recipe1) {
            for (const auto &inc : lattice.incidence(s)) {
                flags.push_back(inc.transposed());
            }
        }
        auto [it, inserted] = lookup.try_emplace({spec, v, flags}, maps.size());
        if (inserted) {
            switch (spec.recipe) {
            case Recipe::recipe2:
                if (basis.bond_dim() != 2) {
                    throw UsageError("instance: recipe 2 needs D = 2");
                }
                maps.push_back(recipe2_site_map(v, *psi, spec.epsilon));
                break;
            case Recipe::recipe1: {
                if (!basis.anchor()) {
                    throw UsageError("instance: recipe 1 needs an anchored basis");
                }
                const PureState conj_anchor(basis.anchor()->amplitudes().conjugate());
                std::vector<PureState> anchors;
                for (bool t : flags) {
                    anchors.push_back(t ? conj_anchor : *basis.anchor());
                }
                maps.push_back(recipe1_site_map(v, d, *psi, anchors, spec.epsilon,
                                                spec.seed, v));
                break;
            }
            default:
                maps.push_back(identity_site_map(v));
                break;
            }
        }
        index.push_back(it->second);
    }
    return PepsInstance(std::move(lattice), std::move(basis), std::move(mset),
                        std::move(maps), std::move(index));
}

} // namespace rsep
