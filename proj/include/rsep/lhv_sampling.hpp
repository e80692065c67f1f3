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
 * @file lhv_sampling.hpp
 * The classical simulation: draw the hidden edge indices from the product of
 * per-edge distributions, then draw each site's outcome independently from
 * tr(sigma_s X_j), sigma_s the normalized output operator selected by the
 * site's incident edge indices.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "measurement_dual.hpp"
#include "peps_construction.hpp"
#include "random.hpp"
#include "rsep_decomposition.hpp"

namespace rsep {

/// One POVM of the instance's measurement set per site.
struct MeasurementPlan {
    std::vector<std::size_t> povm_index;
};

inline MeasurementPlan plan_from_labels(const MeasurementSet &mset,
                                        std::span<const std::string> labels) {
    MeasurementPlan plan;
    for (const auto &label : labels) {
        const auto idx = mset.find(label);
        if (!idx) {
            throw UsageError("plan: no POVM labelled '" + label +
                             "' in the measurement set");
        }
        plan.povm_index.push_back(*idx);
    }
    return plan;
}

inline MeasurementPlan uniform_plan(const MeasurementSet &mset,
                                    const std::string &label, std::size_t n_sites) {
    const std::vector<std::string> labels(n_sites, label);
    return plan_from_labels(mset, labels);
}

inline void validate_plan(const MeasurementPlan &plan, const MeasurementSet &mset,
                          std::size_t n_sites) {
    if (plan.povm_index.size() != n_sites) {
        throw UsageError("plan: expected one POVM per site (" +
                         std::to_string(n_sites) + "), got " +
                         std::to_string(plan.povm_index.size()));
    }
    for (std::size_t i : plan.povm_index) {
        if (i >= mset.size()) {
            throw UsageError("plan: POVM index out of range");
        }
    }
}

struct ShotRecord {
    std::uint64_t shot = 0;
    /// Edge indices; empty unless hidden variables were requested.
    std::vector<std::size_t> hidden;
    std::vector<std::size_t> outcomes;
};

namespace detail {

inline std::vector<double> cumulative(std::span<const double> p) {
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        cdf[i] = acc;
    }
    return cdf;
}

inline std::size_t draw(std::span<const double> cdf, std::mt19937_64 &engine) {
    const double u = uniform01(engine) * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    auto idx = static_cast<std::size_t>(it - cdf.begin());
    idx = std::min(idx, cdf.size() - 1);
    // Never land on a zero-probability index sitting at the end.
    while (idx > 0 && cdf[idx] == cdf[idx - 1]) {
        --idx;
    }
    return idx;
}

inline EdgeAssignment draw_hidden(const std::vector<std::vector<double>> &cdfs,
                                  std::uint64_t seed, std::uint64_t shot) {
    auto engine = keyed_engine(seed, "hidden", {shot});
    EdgeAssignment out;
    out.indices.reserve(cdfs.size());
    for (const auto &cdf : cdfs) {
        out.indices.push_back(draw(cdf, engine));
    }
    return out;
}

} // namespace detail

/// Independent categorical draw per edge, in edge order, from the stream
/// keyed by (seed, shot).
inline EdgeAssignment sample_hidden(const std::vector<std::vector<double>> &edge_probs,
                                    std::uint64_t seed, std::uint64_t shot) {
    std::vector<std::vector<double>> cdfs;
    for (const auto &p : edge_probs) {
        if (p.empty()) {
            throw UsageError("sample_hidden: empty distribution");
        }
        cdfs.push_back(detail::cumulative(p));
    }
    return detail::draw_hidden(cdfs, seed, shot);
}

/// Precomputed sampler for one instance and plan. Conditional outcome
/// distributions are tabulated once per (site map, head/tail pattern, POVM)
/// and per incident index tuple, so the per-shot cost is O(E + N).
class LhvSampler {
  public:
    LhvSampler(const PepsInstance &instance, MeasurementPlan plan)
        : plan_(std::move(plan)), edges_(edge_distribution(instance)) {
        validate_plan(plan_, instance.measurement_set(), instance.n_sites());
        const auto &lat = instance.lattice();
        alphabet_ = instance.basis().size();
        for (const auto &p : edges_.probabilities) {
            edge_cdfs_.push_back(detail::cumulative(p));
        }
        incidence_.resize(lat.n_sites());
        site_table_.resize(lat.n_sites());
        arities_.resize(lat.n_sites());
        std::map<std::tuple<std::size_t, std::vector<bool>, std::size_t>, std::size_t>
            lookup;
        for (std::size_t s = 0; s < lat.n_sites(); ++s) {
            for (const auto &inc : lat.incidence(s)) {
                incidence_[s].push_back(inc.edge);
            }
            const std::size_t povm_idx = plan_.povm_index[s];
            const auto &povm = instance.measurement_set().povm(povm_idx);
            arities_[s] = povm.size();
            auto key = std::make_tuple(instance.map_index(s),
                                       instance.transposed_flags(s), povm_idx);
            auto [it, inserted] = lookup.try_emplace(key, tables_.size());
            if (inserted) {
                tables_.push_back(tabulate(instance, s, povm));
            }
            site_table_[s] = it->second;
        }
    }

    [[nodiscard]] const EdgeDistribution &edges() const { return edges_; }
    [[nodiscard]] const MeasurementPlan &plan() const { return plan_; }
    [[nodiscard]] const std::vector<std::size_t> &arities() const { return arities_; }
    [[nodiscard]] std::size_t n_sites() const { return incidence_.size(); }

    [[nodiscard]] std::size_t site_tuple(std::size_t site,
                                         const EdgeAssignment &lambda) const {
        std::size_t t = 0;
        for (std::size_t e : incidence_[site]) {
            t = t * alphabet_ + lambda.indices.at(e);
        }
        return t;
    }

    /// tr(sigma_s(lambda) X_j) over the planned POVM's elements, clamped.
    [[nodiscard]] const std::vector<double> &
    conditional_probabilities(std::size_t site, const EdgeAssignment &lambda) const {
        return tables_[site_table_.at(site)].probs[site_tuple(site, lambda)];
    }

    [[nodiscard]] EdgeAssignment sample_hidden(std::uint64_t seed,
                                               std::uint64_t shot) const {
        return detail::draw_hidden(edge_cdfs_, seed, shot);
    }

    /// Outcomes of every site given lambda, from the stream keyed by
    /// (seed, shot); sites are drawn in index order and independently.
    [[nodiscard]] ShotRecord sample_outcomes(const EdgeAssignment &lambda,
                                             std::uint64_t seed,
                                             std::uint64_t shot) const {
        if (lambda.indices.size() != edge_cdfs_.size()) {
            throw UsageError("sample_outcomes: assignment length differs from E");
        }
        for (std::size_t i : lambda.indices) {
            if (i >= alphabet_) {
                throw UsageError("sample_outcomes: edge index out of range");
            }
        }
        auto engine = keyed_engine(seed, "outcomes", {shot});
        ShotRecord rec;
        rec.shot = shot;
        rec.outcomes.reserve(n_sites());
        for (std::size_t s = 0; s < n_sites(); ++s) {
            const auto &table = tables_[site_table_[s]];
            rec.outcomes.push_back(
                detail::draw(table.cdfs[site_tuple(s, lambda)], engine));
        }
        return rec;
    }

    [[nodiscard]] ShotRecord shot(std::uint64_t seed, std::uint64_t shot,
                                  bool emit_hidden) const {
        auto lambda = sample_hidden(seed, shot);
        auto rec = sample_outcomes(lambda, seed, shot);
        if (emit_hidden) {
            rec.hidden = std::move(lambda.indices);
        }
        return rec;
    }

    /// Shots [0, n) handed to @p sink in shot order. Work is split across
    /// @p workers threads in blocks; records do not depend on the split.
    template <typename Sink>
    void run_shots(std::uint64_t n_shots, std::uint64_t seed, std::size_t workers,
                   bool emit_hidden, Sink &&sink) const {
        workers = std::max<std::size_t>(1, workers);
        constexpr std::uint64_t kBlock = 1 << 14;
        std::vector<ShotRecord> block;
        for (std::uint64_t start = 0; start < n_shots; start += kBlock) {
            const std::uint64_t count = std::min(kBlock, n_shots - start);
            block.assign(count, ShotRecord{});
            if (workers == 1 || count < 2 * workers) {
                for (std::uint64_t i = 0; i < count; ++i) {
                    block[i] = shot(seed, start + i, emit_hidden);
                }
            } else {
                std::vector<std::thread> pool;
                for (std::size_t w = 0; w < workers; ++w) {
                    pool.emplace_back([&, w] {
                        for (std::uint64_t i = w; i < count; i += workers) {
                            block[i] = shot(seed, start + i, emit_hidden);
                        }
                    });
                }
                for (auto &t : pool) {
                    t.join();
                }
            }
            for (auto &rec : block) {
                sink(std::move(rec));
            }
        }
    }

    [[nodiscard]] std::vector<ShotRecord> run_shots(std::uint64_t n_shots,
                                                    std::uint64_t seed,
                                                    std::size_t workers = 1,
                                                    bool emit_hidden = false) const {
        std::vector<ShotRecord> out;
        out.reserve(n_shots);
        run_shots(n_shots, seed, workers, emit_hidden,
                  [&out](ShotRecord &&r) { out.push_back(std::move(r)); });
        return out;
    }

  private:
    struct OutcomeTable {
        std::vector<std::vector<double>> probs;
        std::vector<std::vector<double>> cdfs;
    };

    OutcomeTable tabulate(const PepsInstance &instance, std::size_t site,
                          const Povm &povm) const {
        const auto &map = instance.site_map(site);
        const auto flags = instance.transposed_flags(site);
        const std::size_t count = int_pow(alphabet_, map.degree());
        SiteOutputTable shape{map.degree(), alphabet_, {}, {}};
        OutcomeTable out;
        for (std::size_t flat = 0; flat < count; ++flat) {
            const auto tuple = shape.tuple(flat);
            const auto op = site_output_operator(map, instance.basis(), tuple, flags);
            const double tr = op.trace();
            std::vector<double> p(povm.size());
            for (std::size_t j = 0; j < povm.size(); ++j) {
                double x = hs_inner(op, povm.element(j)) / tr;
                if (x < -kProbabilityTolerance || x > 1.0 + kProbabilityTolerance) {
                    std::string t;
                    for (std::size_t k : tuple) {
                        t += (t.empty() ? "" : ",") + std::to_string(k);
                    }
                    throw PositivityViolation(
                        "sampler: site " + std::to_string(site) + " tuple [" + t +
                        "] gives probability " + std::to_string(x) +
                        " for element " + std::to_string(j) + " of POVM '" +
                        povm.label() + "'");
                }
                p[j] = std::clamp(x, 0.0, 1.0);
            }
            out.cdfs.push_back(detail::cumulative(p));
            out.probs.push_back(std::move(p));
        }
        return out;
    }

    MeasurementPlan plan_;
    EdgeDistribution edges_;
    std::size_t alphabet_ = 0;
    std::vector<std::vector<double>> edge_cdfs_;
    std::vector<std::vector<std::size_t>> incidence_;
    std::vector<std::size_t> site_table_;
    std::vector<std::size_t> arities_;
    std::vector<OutcomeTable> tables_;
};

} // namespace rsep
