// SPDX-License-Identifier: Apache-2.0

#include "triage/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "triage/error.hpp"
#include "triage/rng.hpp"

namespace triage {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<std::vector<double>> kmeanspp_init(const FeatureMatrix& matrix, std::size_t k,
                                               RandomStream& stream) {
    const std::size_t n = matrix.node_count();
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);

    auto row_copy = [&](std::size_t i) {
        auto r = matrix.row(i);
        return std::vector<double>(r.begin(), r.end());
    };

    centroids.push_back(row_copy(stream.below(n)));
    std::vector<double> best(n, std::numeric_limits<double>::max());
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            best[i] = std::min(best[i], sq_dist(matrix.row(i), centroids.back()));
            total += best[i];
        }
        std::size_t chosen;
        if (total <= 0.0) {
            chosen = stream.below(n);  // all points coincide with a centroid
        } else {
            const double target = stream.uniform() * total;
            double acc = 0.0;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += best[i];
                if (acc > target) {
                    chosen = i;
                    break;
                }
            }
        }
        centroids.push_back(row_copy(chosen));
    }
    return centroids;
}

ClusterResult lloyd(const FeatureMatrix& matrix, std::size_t k, RandomStream& stream,
                    const KmeansOptions& options) {
    const std::size_t n = matrix.node_count();
    const std::size_t d = matrix.feature_count();

    ClusterResult result;
    result.centroids = kmeanspp_init(matrix, k, stream);
    result.assignment.assign(n, 0);

    std::vector<double> point_cost(n, 0.0);
    auto assign = [&]() {
        const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
        for (std::int64_t ii = 0; ii < nn; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            std::size_t best_c = 0;
            double best_d = sq_dist(matrix.row(i), result.centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double dist = sq_dist(matrix.row(i), result.centroids[c]);
                if (dist < best_d) {
                    best_d = dist;
                    best_c = c;
                }
            }
            result.assignment[i] = static_cast<int>(best_c) + 1;
            point_cost[i] = best_d;
        }
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) inertia += point_cost[i];  // fixed order
        return inertia;
    };

    double prev = std::numeric_limits<double>::max();
    for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
        const double inertia = assign();
        require(inertia <= prev * (1.0 + 1e-12) + 1e-12,
                "kmeans: inertia increased between iterations");
        result.inertia_history.push_back(inertia);
        result.inertia = inertia;
        result.iterations = iter + 1;
        prev = inertia;

        // update step, fixed node order
        std::vector<std::vector<double>> next(k, std::vector<double>(d, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(result.assignment[i] - 1);
            ++counts[c];
            auto row = matrix.row(i);
            for (std::size_t j = 0; j < d; ++j) next[c][j] += row[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // reseed the empty cluster from the farthest point
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i) {
                    if (point_cost[i] > point_cost[far]) far = i;
                }
                auto row = matrix.row(far);
                next[c].assign(row.begin(), row.end());
                point_cost[far] = 0.0;
            } else {
                for (std::size_t j = 0; j < d; ++j) next[c][j] /= static_cast<double>(counts[c]);
            }
        }

        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            movement = std::max(movement, sq_dist(next[c], result.centroids[c]));
        }
        result.centroids = std::move(next);
        if (movement < options.tol * options.tol) break;
    }

    // final assignment so every node maps to its nearest centroid
    const double final_inertia = assign();
    require(final_inertia <= prev * (1.0 + 1e-12) + 1e-12,
            "kmeans: inertia increased at final assignment");
    result.inertia_history.push_back(final_inertia);
    result.inertia = final_inertia;
    return result;
}

}  // namespace

ClusterResult kmeans(const FeatureMatrix& matrix, std::size_t k, std::uint64_t seed,
                     const KmeansOptions& options) {
    require(k > 0, "kmeans: k must be positive");
    require(k <= matrix.node_count(), "kmeans: k exceeds node count");
    require(options.restarts > 0, "kmeans: need at least one restart");

    ClusterResult best;
    bool have_best = false;
    for (std::size_t r = 0; r < options.restarts; ++r) {
        RandomStream stream(derive_seed(seed, 0x6b6d6561ULL + r));  // "kmea"
        ClusterResult run = lloyd(matrix, k, stream, options);
        if (!have_best || run.inertia < best.inertia) {
            best = std::move(run);
            have_best = true;
        }
    }
    return best;
}

}  // namespace triage
