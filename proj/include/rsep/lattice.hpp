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
 * @file lattice.hpp
 * Oriented lattices. Every edge has a head, whose virtual particle carries
 * C_k, and a tail, whose virtual particle carries C_k^T. A site's incident
 * edges are listed in increasing edge index; that order fixes the tensor
 * position of each virtual particle at the site.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace rsep {

struct Edge {
    std::size_t head = 0;
    std::size_t tail = 0;

    friend bool operator==(const Edge &, const Edge &) = default;
    friend auto operator<=>(const Edge &, const Edge &) = default;
};

/// One virtual particle at a site.
struct Incidence {
    std::size_t edge = 0;
    bool is_head = true;

    /// Tails carry the transposed basis.
    [[nodiscard]] bool transposed() const { return !is_head; }
};

class Lattice {
  public:
    Lattice(std::size_t n_sites, std::vector<Edge> edges)
        : n_sites_(n_sites), edges_(std::move(edges)), incidence_(n_sites) {
        if (n_sites_ < 1) {
            throw UsageError("Lattice: no sites");
        }
        if (edges_.empty()) {
            throw UsageError("Lattice: no edges");
        }
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const auto [h, t] = edges_[e];
            if (h >= n_sites_ || t >= n_sites_) {
                throw UsageError("Lattice: edge " + std::to_string(e) +
                                 " references a missing site");
            }
            if (h == t) {
                throw UsageError("Lattice: self-loop at site " +
                                 std::to_string(h));
            }
            if (!seen.insert(std::minmax(h, t)).second) {
                throw UsageError("Lattice: parallel edges between sites " +
                                 std::to_string(h) + " and " +
                                 std::to_string(t));
            }
            incidence_[h].push_back({e, true});
            incidence_[t].push_back({e, false});
        }
        for (std::size_t s = 0; s < n_sites_; ++s) {
            if (incidence_[s].empty()) {
                throw UsageError("Lattice: site " + std::to_string(s) +
                                 " has no edges");
            }
        }
    }

    [[nodiscard]] std::size_t n_sites() const { return n_sites_; }
    [[nodiscard]] std::size_t n_edges() const { return edges_.size(); }
    [[nodiscard]] const std::vector<Edge> &edges() const { return edges_; }
    [[nodiscard]] const Edge &edge(std::size_t e) const { return edges_.at(e); }

    /// Incident edges of @p site in increasing edge index.
    [[nodiscard]] const std::vector<Incidence> &incidence(std::size_t site) const {
        return incidence_.at(site);
    }
    [[nodiscard]] std::size_t degree(std::size_t site) const {
        return incidence(site).size();
    }
    [[nodiscard]] std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> out;
        for (const auto &inc : incidence_) {
            out.push_back(inc.size());
        }
        return out;
    }
    [[nodiscard]] std::size_t max_degree() const {
        std::size_t v = 0;
        for (const auto &inc : incidence_) {
            v = std::max(v, inc.size());
        }
        return v;
    }

    /// Oriented edge set after mapping every site through @p site_map.
    template <typename SiteMap>
    [[nodiscard]] std::set<Edge> mapped_edges(SiteMap &&site_map) const {
        std::set<Edge> out;
        for (const auto &e : edges_) {
            out.insert({site_map(e.head), site_map(e.tail)});
        }
        return out;
    }

    [[nodiscard]] std::set<Edge> edge_set() const {
        return {edges_.begin(), edges_.end()};
    }

    friend bool operator==(const Lattice &a, const Lattice &b) {
        return a.n_sites_ == b.n_sites_ && a.edges_ == b.edges_;
    }

  private:
    std::size_t n_sites_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> incidence_;
};

/// Open chain, edges (s, s+1) with the head at the lower index.
inline Lattice build_chain(std::size_t n) {
    if (n < 2) {
        throw UsageError("build_chain: N must be at least 2");
    }
    std::vector<Edge> edges;
    for (std::size_t s = 0; s + 1 < n; ++s) {
        edges.push_back({s, s + 1});
    }
    return Lattice(n, std::move(edges));
}

/// Ring with edges (s, s+1 mod N), all oriented the same way round.
inline Lattice build_cycle(std::size_t n) {
    if (n < 3) {
        throw UsageError("build_cycle: N must be at least 3");
    }
    std::vector<Edge> edges;
    for (std::size_t s = 0; s < n; ++s) {
        edges.push_back({s, (s + 1) % n});
    }
    return Lattice(n, std::move(edges));
}

/// Periodic square lattice; site (x, y) has index x + Lx*y. All horizontal
/// edges (oriented +x) come first, then all vertical edges (oriented +y).
inline Lattice build_torus(std::size_t lx, std::size_t ly) {
    if (lx < 3 || ly < 3) {
        throw UsageError("build_torus: both extents must be at least 3");
    }
    const auto site = [lx](std::size_t x, std::size_t y) { return x + lx * y; };
    std::vector<Edge> edges;
    for (std::size_t y = 0; y < ly; ++y) {
        for (std::size_t x = 0; x < lx; ++x) {
            edges.push_back({site(x, y), site((x + 1) % lx, y)});
        }
    }
    for (std::size_t y = 0; y < ly; ++y) {
        for (std::size_t x = 0; x < lx; ++x) {
            edges.push_back({site(x, y), site(x, (y + 1) % ly)});
        }
    }
    return Lattice(lx * ly, std::move(edges));
}

namespace detail {

inline std::size_t parse_extent(std::string_view text, std::string_view spec) {
    std::size_t pos = 0;
    const std::string s(text);
    unsigned long v = 0;
    try {
        v = std::stoul(s, &pos);
    } catch (const std::exception &) {
        pos = std::string::npos;
    }
    if (s.empty() || pos != s.size()) {
        throw UsageError("malformed lattice spec '" + std::string(spec) + "'");
    }
    return static_cast<std::size_t>(v);
}

} // namespace detail

/// "chain:N", "cycle:N" or "torus:LxxLy" (e.g. "torus:3x3").
inline Lattice lattice_from_spec(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw UsageError("malformed lattice spec '" + std::string(spec) + "'");
    }
    const auto kind = spec.substr(0, colon);
    const auto args = spec.substr(colon + 1);
    if (kind == "chain") {
        return build_chain(detail::parse_extent(args, spec));
    }
    if (kind == "cycle") {
        return build_cycle(detail::parse_extent(args, spec));
    }
    if (kind == "torus") {
        const auto x = args.find('x');
        if (x == std::string_view::npos) {
            throw UsageError("malformed lattice spec '" + std::string(spec) + "'");
        }
        return build_torus(detail::parse_extent(args.substr(0, x), spec),
                           detail::parse_extent(args.substr(x + 1), spec));
    }
    throw UsageError("unknown lattice kind in '" + std::string(spec) + "'");
}

} // namespace rsep
