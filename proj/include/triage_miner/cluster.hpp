#pragma once

// Seeded K-means (k-means++ initialisation, Lloyd iterations) over the four
// antecedent attribute codes of each bug record.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "triage_miner/error.hpp"
#include "triage_miner/ingest.hpp"

namespace triage_miner {

/// (severity, priority, component, os) codes as reals. The assignee is the
/// prediction target and is never part of the feature vector.
using FeatureVector = std::array<double, 4>;

inline FeatureVector features(const BugRecord& r) noexcept {
    return {static_cast<double>(r.severity), static_cast<double>(r.priority),
            static_cast<double>(r.component), static_cast<double>(r.operating_system)};
}

inline std::vector<FeatureVector> features(std::span<const BugRecord> records) {
    std::vector<FeatureVector> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(features(r));
    return out;
}

inline double squared_distance(const FeatureVector& a, const FeatureVector& b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct ClusterModel {
    std::size_t k = 0;
    std::vector<FeatureVector> centroids;
    std::vector<std::size_t> assignments;  // point index -> cluster index
    double inertia = 0.0;
    std::uint64_t seed = 0;
    std::size_t iterations_run = 0;
    std::vector<double> inertia_history;  // after each centroid update

    std::vector<std::size_t> cluster_sizes() const {
        std::vector<std::size_t> sizes(k, 0);
        for (auto a : assignments) ++sizes[a];
        return sizes;
    }
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; avoids the
/// implementation-defined std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t nearest_centroid(const FeatureVector& p, std::span<const FeatureVector> centroids) {
    std::size_t best = 0;
    double best_d = squared_distance(p, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = squared_distance(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

inline double inertia_of(std::span<const FeatureVector> points, std::span<const FeatureVector> centroids,
                         std::span<const std::size_t> assignments) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        total += squared_distance(points[i], centroids[assignments[i]]);
    }
    return total;
}

inline std::size_t count_distinct(std::span<const FeatureVector> points) {
    std::vector<FeatureVector> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

inline std::vector<FeatureVector> kmeans_plus_plus(std::span<const FeatureVector> points, std::size_t k,
                                                   std::mt19937_64& rng) {
    const std::size_t n = points.size();
    std::vector<FeatureVector> centroids;
    centroids.reserve(k);
    centroids.push_back(points[std::min(n - 1, static_cast<std::size_t>(unit_uniform(rng) * n))]);

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centroids[0]);

    while (centroids.size() < k) {
        double total = 0.0;
        for (double d : d2) total += d;
        // total > 0 because k <= distinct points
        const double target = unit_uniform(rng) * total;
        std::size_t chosen = n;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (d2[i] <= 0.0) continue;
            last_positive = i;
            acc += d2[i];
            if (acc > target) {
                chosen = i;
                break;
            }
        }
        if (chosen == n) chosen = last_positive;
        centroids.push_back(points[chosen]);
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
        }
    }
    return centroids;
}

/// Nearest-centroid assignment (ties to the lowest index). While a cluster is
/// empty its centroid moves onto the point farthest from its own centroid and
/// the assignment is redone. Each repair strictly lowers the objective.
inline std::vector<std::size_t> assign_with_repair(std::span<const FeatureVector> points,
                                                   std::vector<FeatureVector>& centroids) {
    const std::size_t n = points.size();
    const std::size_t k = centroids.size();
    std::vector<std::size_t> assignments(n);
    for (;;) {
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            assignments[i] = nearest_centroid(points[i], centroids);
            ++sizes[assignments[i]];
        }
        const auto empty = std::find(sizes.begin(), sizes.end(), std::size_t{0});
        if (empty == sizes.end()) return assignments;

        std::size_t farthest = 0;
        double farthest_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = squared_distance(points[i], centroids[assignments[i]]);
            if (d > farthest_d) {
                farthest_d = d;
                farthest = i;
            }
        }
        centroids[static_cast<std::size_t>(empty - sizes.begin())] = points[farthest];
    }
}

inline std::vector<FeatureVector> cluster_means(std::span<const FeatureVector> points,
                                                std::span<const std::size_t> assignments, std::size_t k) {
    std::vector<FeatureVector> sums(k, FeatureVector{});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& s = sums[assignments[i]];
        for (std::size_t d = 0; d < s.size(); ++d) s[d] += points[i][d];
        ++counts[assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (auto& v : sums[c]) v /= static_cast<double>(counts[c]);
    }
    return sums;
}

}  // namespace detail

/// Lloyd's algorithm from k-means++ seeds drawn with mt19937_64(seed).
/// Stops at an assignment fixpoint or after max_iterations centroid updates.
/// The returned assignment is always nearest-centroid for the returned
/// centroids and leaves no cluster empty.
inline ClusterModel kmeans_fit(std::span<const FeatureVector> points, std::size_t k, std::uint64_t seed,
                               std::size_t max_iterations = 100) {
    if (k == 0) throw ParameterError("k must be positive");
    if (max_iterations == 0) throw ParameterError("max_iterations must be positive");
    if (points.empty()) throw ParameterError("no points to cluster");
    const std::size_t distinct = detail::count_distinct(points);
    if (k > distinct) throw InfeasibleKError(k, distinct);

    ClusterModel model;
    model.k = k;
    model.seed = seed;

    std::mt19937_64 rng(seed);
    std::vector<FeatureVector> centroids = detail::kmeans_plus_plus(points, k, rng);
    std::vector<std::size_t> previous;
    std::vector<std::size_t> assignments;

    bool converged = false;
    while (model.iterations_run < max_iterations) {
        assignments = detail::assign_with_repair(points, centroids);
        if (assignments == previous) {
            converged = true;
            break;
        }
        centroids = detail::cluster_means(points, assignments, k);
        model.inertia_history.push_back(detail::inertia_of(points, centroids, assignments));
        ++model.iterations_run;
        previous = assignments;
    }
    if (!converged) {
        // Budget exhausted: make the assignment consistent with the final centroids.
        assignments = detail::assign_with_repair(points, centroids);
        const double final_inertia = detail::inertia_of(points, centroids, assignments);
        if (final_inertia != model.inertia_history.back()) model.inertia_history.push_back(final_inertia);
    }

    model.centroids = std::move(centroids);
    model.assignments = std::move(assignments);
    model.inertia = detail::inertia_of(points, model.centroids, model.assignments);
    return model;
}

/// Records of each cluster, preserving input order within a cluster.
inline std::vector<std::vector<BugRecord>> split_by_cluster(std::span<const BugRecord> records,
                                                            const ClusterModel& model) {
    if (model.assignments.size() != records.size()) {
        throw ConsistencyError("cluster model covers " + std::to_string(model.assignments.size()) +
                               " records, dataset has " + std::to_string(records.size()));
    }
    std::vector<std::vector<BugRecord>> out(model.k);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto c = model.assignments[i];
        if (c >= model.k) {
            throw ConsistencyError("record " + std::to_string(i) + " assigned to cluster " +
                                   std::to_string(c) + " of " + std::to_string(model.k));
        }
        out[c].push_back(records[i]);
    }
    return out;
}

/// Checks every ClusterModel invariant against the points; returns violations.
inline std::vector<std::string> audit_cluster_model(const ClusterModel& model,
                                                    std::span<const FeatureVector> points) {
    std::vector<std::string> problems;
    if (model.centroids.size() != model.k) problems.push_back("centroid count differs from k");
    if (model.assignments.size() != points.size()) {
        problems.push_back("assignment count differs from point count");
        return problems;
    }
    std::vector<std::size_t> sizes(model.k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto a = model.assignments[i];
        if (a >= model.k) {
            problems.push_back("assignment out of range at point " + std::to_string(i));
            return problems;
        }
        ++sizes[a];
        if (detail::nearest_centroid(points[i], model.centroids) != a) {
            problems.push_back("point " + std::to_string(i) + " is not assigned to its nearest centroid");
        }
    }
    for (std::size_t c = 0; c < model.k; ++c) {
        if (sizes[c] == 0) problems.push_back("cluster " + std::to_string(c) + " is empty");
    }
    const double recomputed = detail::inertia_of(points, model.centroids, model.assignments);
    if (std::abs(recomputed - model.inertia) > 1e-9 * std::max(1.0, std::abs(recomputed))) {
        problems.push_back("inertia does not match recomputed value");
    }
    for (std::size_t i = 1; i < model.inertia_history.size(); ++i) {
        if (model.inertia_history[i] > model.inertia_history[i - 1]) {
            problems.push_back("inertia increased at iteration " + std::to_string(i + 1));
        }
    }
    return problems;
}

/// `clusters.json`: k, seed, centroids, per-record cluster keyed by bug id, sizes.
inline nlohmann::json cluster_model_to_json(const ClusterModel& model, std::span<const BugRecord> records) {
    nlohmann::json assignments = nlohmann::json::object();
    for (std::size_t i = 0; i < records.size() && i < model.assignments.size(); ++i) {
        assignments[records[i].bug_id] = model.assignments[i];
    }
    return {{"k", model.k},
            {"seed", model.seed},
            {"iterations_run", model.iterations_run},
            {"inertia", model.inertia},
            {"centroids", model.centroids},
            {"cluster_sizes", model.cluster_sizes()},
            {"assignments", std::move(assignments)}};
}

}  // namespace triage_miner
