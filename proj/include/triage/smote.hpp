// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace triage {

struct SmoteConfig {
    std::size_t k_neighbors = 5;
    std::size_t amount_percent = 300;  // multiple of 100; 0 disables
    std::uint64_t seed = 0;
};

struct SmoteSynthetic {
    std::vector<double> point;
    std::size_t parent_a;  // the seed minority point
    std::size_t parent_b;  // the chosen neighbour
    double u;              // interpolation parameter in [0, 1)
};

/// Synthetic minority oversampling: each synthetic is p + u * (q - p) with q
/// one of p's k nearest minority neighbours (Euclidean, ties to the lower
/// index). Produces amount_percent/100 synthetics per minority point.
/// Per-point seeded streams keep the result independent of evaluation order.
std::vector<SmoteSynthetic> smote(const std::vector<std::vector<double>>& minority,
                                  const SmoteConfig& config);

}  // namespace triage
