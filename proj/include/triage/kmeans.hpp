// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "triage/stats.hpp"

namespace triage {

struct ClusterResult {
    std::vector<int> assignment;          // node -> cluster label, 1..k
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;                 // total within-cluster squared distance
    std::size_t iterations = 0;
    std::vector<double> inertia_history;  // recorded after every assignment step
};

struct KmeansOptions {
    std::size_t max_iter = 100;
    double tol = 1e-9;       // centroid movement threshold
    std::size_t restarts = 10;
};

/// Lloyd iterations from seeded k-means++ starts; the best of `restarts`
/// runs by final inertia wins. Empty clusters reseed from the farthest
/// point. Deterministic given (matrix, k, seed) at any thread count; inertia
/// is checked to be non-increasing after every assignment.
ClusterResult kmeans(const FeatureMatrix& matrix, std::size_t k, std::uint64_t seed,
                     const KmeansOptions& options = {});

}  // namespace triage
