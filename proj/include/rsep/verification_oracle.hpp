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
 * @file verification_oracle.hpp
 * Brute-force reference distributions and statistical acceptance checks for
 * the sampler.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "errors.hpp"
#include "lhv_sampling.hpp"
#include "measurement_dual.hpp"
#include "operator_core.hpp"
#include "peps_construction.hpp"
#include "rsep_decomposition.hpp"

namespace rsep {

inline constexpr std::size_t kMaxOutcomeSpace = std::size_t{1} << 16;
inline constexpr double kDefaultConfidence = 4.0;

/// Probabilities over the product outcome space, site 0 most significant.
class JointDistribution {
  public:
    JointDistribution() = default;
    JointDistribution(std::vector<std::size_t> arities, std::vector<double> probs)
        : arities_(std::move(arities)), probs_(std::move(probs)) {
        if (probs_.size() != outcome_count(arities_)) {
            throw UsageError("JointDistribution: size differs from the outcome "
                             "space");
        }
    }

    static std::size_t outcome_count(std::span<const std::size_t> arities) {
        std::size_t k = 1;
        for (std::size_t a : arities) {
            k *= a;
            if (k > kMaxOutcomeSpace) {
                throw ConstructionError("outcome space exceeds 2^16 joint "
                                        "outcomes");
            }
        }
        return k;
    }

    [[nodiscard]] const std::vector<std::size_t> &arities() const { return arities_; }
    [[nodiscard]] const std::vector<double> &probs() const { return probs_; }
    [[nodiscard]] std::size_t size() const { return probs_.size(); }
    [[nodiscard]] double operator[](std::size_t flat) const { return probs_[flat]; }

    [[nodiscard]] std::size_t flat_index(std::span<const std::size_t> outcomes) const {
        if (outcomes.size() != arities_.size()) {
            throw UsageError("JointDistribution: outcome tuple length mismatch");
        }
        std::size_t flat = 0;
        for (std::size_t s = 0; s < outcomes.size(); ++s) {
            if (outcomes[s] >= arities_[s]) {
                throw UsageError("JointDistribution: outcome out of range");
            }
            flat = flat * arities_[s] + outcomes[s];
        }
        return flat;
    }

    [[nodiscard]] double sum() const {
        double acc = 0.0;
        for (double p : probs_) {
            acc += p;
        }
        return acc;
    }
    [[nodiscard]] double min() const {
        return *std::min_element(probs_.begin(), probs_.end());
    }

  private:
    std::vector<std::size_t> arities_;
    std::vector<double> probs_;
};

inline std::vector<std::size_t> plan_arities(const MeasurementSet &mset,
                                             const MeasurementPlan &plan) {
    std::vector<std::size_t> out;
    for (std::size_t i : plan.povm_index) {
        out.push_back(mset.povm(i).size());
    }
    return out;
}

/// p(j_1..j_N) = <Psi| (x)_s X_{j_s} |Psi>, contracted site by site through
/// the spectral decomposition of each element.
inline JointDistribution exact_joint_distribution(const PureState &state,
                                                  std::span<const std::size_t> site_dims,
                                                  const MeasurementSet &mset,
                                                  const MeasurementPlan &plan) {
    validate_plan(plan, mset, site_dims.size());
    if (product_of(site_dims) != state.dim()) {
        throw UsageError("exact_joint_distribution: site dimensions do not match "
                         "the state");
    }
    for (std::size_t d : site_dims) {
        if (d != mset.dim()) {
            throw UsageError("exact_joint_distribution: site dimension differs "
                             "from the measurement dimension");
        }
    }
    const auto arities = plan_arities(mset, plan);
    const std::size_t k = JointDistribution::outcome_count(arities);
    const std::size_t n = site_dims.size();

    // Element j of site s's POVM as sum_r |a_r><a_r|.
    std::vector<std::vector<std::vector<ComplexVector>>> factors(n);
    for (std::size_t s = 0; s < n; ++s) {
        const auto &povm = mset.povm(plan.povm_index[s]);
        for (const auto &x : povm.elements()) {
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(x.matrix());
            std::vector<ComplexVector> vecs;
            for (Eigen::Index r = 0; r < eig.eigenvalues().size(); ++r) {
                const double lam = eig.eigenvalues()(r);
                if (lam > 1e-14) {
                    vecs.push_back(std::sqrt(lam) * eig.eigenvectors().col(r));
                }
            }
            factors[s].push_back(std::move(vecs));
        }
    }

    std::vector<double> probs(k, 0.0);
    // Contract the leading site of psi with <a| for every (element, vector).
    const auto recurse = [&](auto &&self, const ComplexVector &psi, std::size_t s,
                             std::size_t flat) -> void {
        if (s == n) {
            probs[flat] += std::norm(psi(0));
            return;
        }
        const auto d = static_cast<Eigen::Index>(site_dims[s]);
        const Eigen::Index rest = psi.size() / d;
        const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>
            view(psi.data(), d, rest);
        for (std::size_t j = 0; j < factors[s].size(); ++j) {
            for (const auto &a : factors[s][j]) {
                const ComplexVector next = view.transpose() * a.conjugate();
                self(self, next, s + 1, flat * arities[s] + j);
            }
        }
    };
    recurse(recurse, state.amplitudes(), 0, 0);
    return JointDistribution(arities, std::move(probs));
}

inline JointDistribution exact_joint_distribution(const ExactState &state,
                                                  const MeasurementSet &mset,
                                                  const MeasurementPlan &plan) {
    return exact_joint_distribution(state.normalized(), state.site_dims, mset, plan);
}

/// sum_lambda p(lambda) prod_s tr(sigma_s(lambda) X_{j_s}) by enumerating
/// every edge assignment; T taken from the assembled state.
inline JointDistribution mixture_joint_distribution(const PepsInstance &instance,
                                                    const MeasurementPlan &plan) {
    const auto &mset = instance.measurement_set();
    validate_plan(plan, mset, instance.n_sites());
    const auto arities = plan_arities(mset, plan);
    const std::size_t k = JointDistribution::outcome_count(arities);
    const double norm_squared = assemble_exact_state(instance).norm_squared;

    // Per-site tables of tr(O X_j) (unnormalized) for the planned POVM.
    std::vector<std::vector<std::vector<double>>> site_probs(instance.n_sites());
    std::vector<std::vector<double>> site_traces(instance.n_sites());
    for (std::size_t s = 0; s < instance.n_sites(); ++s) {
        const auto table = site_output_table(instance, s);
        const auto &povm = mset.povm(plan.povm_index[s]);
        for (std::size_t t = 0; t < table.size(); ++t) {
            std::vector<double> p;
            for (const auto &x : povm.elements()) {
                p.push_back(hs_inner(table.operators[t], x));
            }
            site_probs[s].push_back(std::move(p));
        }
        site_traces[s] = table.traces;
    }
    const double scale =
        std::pow(static_cast<double>(instance.basis().bond_dim()),
                 -2.0 * static_cast<double>(instance.lattice().n_edges())) /
        norm_squared;

    std::vector<double> probs(k, 0.0);
    std::vector<double> joint;
    for_each_assignment(instance, [&](const auto &, const auto &tuples) {
        // p(lambda) prod_s tr(O X)/tr(O), with p(lambda) = scale prod_s tr(O).
        double weight = scale;
        for (std::size_t s = 0; s < tuples.size(); ++s) {
            weight *= site_traces[s][tuples[s]];
        }
        joint.assign(1, weight);
        for (std::size_t s = 0; s < tuples.size(); ++s) {
            const auto &p = site_probs[s][tuples[s]];
            const double tr = site_traces[s][tuples[s]];
            std::vector<double> next(joint.size() * p.size());
            for (std::size_t a = 0; a < joint.size(); ++a) {
                for (std::size_t b = 0; b < p.size(); ++b) {
                    next[a * p.size() + b] = joint[a] * (p[b] / tr);
                }
            }
            joint.swap(next);
        }
        for (std::size_t i = 0; i < k; ++i) {
            probs[i] += joint[i];
        }
    });
    return JointDistribution(arities, std::move(probs));
}

inline double tv_distance(const JointDistribution &p, const JointDistribution &q) {
    if (p.arities() != q.arities()) {
        throw UsageError("tv_distance: outcome spaces differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += std::abs(p[i] - q[i]);
    }
    return 0.5 * acc;
}

inline JointDistribution empirical_distribution(std::span<const ShotRecord> shots,
                                                const std::vector<std::size_t> &arities) {
    if (shots.empty()) {
        throw UsageError("empirical_distribution: no shots");
    }
    const std::size_t k = JointDistribution::outcome_count(arities);
    JointDistribution shape(arities, std::vector<double>(k, 0.0));
    std::vector<double> counts(k, 0.0);
    for (const auto &rec : shots) {
        counts[shape.flat_index(rec.outcomes)] += 1.0;
    }
    for (double &c : counts) {
        c /= static_cast<double>(shots.size());
    }
    return JointDistribution(arities, std::move(counts));
}

struct FrequencyReport {
    double tv = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::size_t outcome_count = 0;
    std::size_t n_shots = 0;
    double confidence = kDefaultConfidence;
};

inline constexpr std::size_t kMinFrequencyShots = 1000;

/// Pass iff TV(empirical, exact) <= k sqrt(K / n_shots).
inline FrequencyReport frequency_test(std::span<const ShotRecord> shots,
                                      const JointDistribution &exact,
                                      double confidence = kDefaultConfidence) {
    if (shots.empty()) {
        throw UsageError("frequency_test: empty shot stream");
    }
    if (shots.size() < kMinFrequencyShots) {
        throw UsageError("frequency_test: need at least 1000 shots");
    }
    FrequencyReport r;
    r.n_shots = shots.size();
    r.outcome_count = exact.size();
    r.confidence = confidence;
    r.tv = tv_distance(empirical_distribution(shots, exact.arities()), exact);
    r.threshold = confidence * std::sqrt(static_cast<double>(r.outcome_count) /
                                         static_cast<double>(r.n_shots));
    r.pass = r.tv <= r.threshold;
    return r;
}

struct IndependenceReport {
    double tv = 0.0;
    double threshold = 0.0;
    bool pass = false;
    /// Observed hidden assignments times joint outcomes.
    std::size_t cells = 0;
    std::size_t hidden_values = 0;
    std::size_t n_shots = 0;
};

/// Local-hidden-variable structure: compares the empirical joint of
/// (lambda, outcomes) with p_emp(lambda) prod_s p(j_s | lambda), i.e. tests
/// that sites are independent given lambda with the tabulated conditionals.
inline IndependenceReport conditional_independence_test(
    std::span<const ShotRecord> shots, const LhvSampler &sampler,
    double confidence = kDefaultConfidence) {
    if (shots.size() < kMinFrequencyShots) {
        throw UsageError("conditional_independence_test: need at least 1000 shots");
    }
    const auto &arities = sampler.arities();
    const std::size_t k = JointDistribution::outcome_count(arities);
    JointDistribution shape(arities, std::vector<double>(k, 0.0));
    std::map<std::vector<std::size_t>, std::vector<double>> counts;
    for (const auto &rec : shots) {
        if (rec.hidden.empty()) {
            throw UsageError("conditional_independence_test: shots carry no "
                             "hidden variables");
        }
        auto &row = counts[rec.hidden];
        if (row.empty()) {
            row.assign(k, 0.0);
        }
        row[shape.flat_index(rec.outcomes)] += 1.0;
    }
    const double n = static_cast<double>(shots.size());
    IndependenceReport r;
    r.n_shots = shots.size();
    r.hidden_values = counts.size();
    r.cells = counts.size() * k;
    std::vector<std::size_t> outcome(arities.size());
    for (const auto &[hidden, row] : counts) {
        const EdgeAssignment lambda{hidden};
        double n_lambda = 0.0;
        for (double c : row) {
            n_lambda += c;
        }
        std::vector<const std::vector<double> *> cond;
        for (std::size_t s = 0; s < arities.size(); ++s) {
            cond.push_back(&sampler.conditional_probabilities(s, lambda));
        }
        for (std::size_t flat = 0; flat < k; ++flat) {
            std::size_t rem = flat;
            double q = n_lambda / n;
            for (std::size_t s = arities.size(); s-- > 0;) {
                q *= (*cond[s])[rem % arities[s]];
                rem /= arities[s];
            }
            r.tv += std::abs(row[flat] / n - q);
        }
    }
    r.tv *= 0.5;
    r.threshold = confidence * std::sqrt(static_cast<double>(r.cells) / n);
    r.pass = r.tv <= r.threshold;
    return r;
}

} // namespace rsep
