// SPDX-License-Identifier: Apache-2.0

#include "triage/smote.hpp"

#include <algorithm>
#include <cmath>

#include "triage/error.hpp"
#include "triage/rng.hpp"

namespace triage {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

std::vector<SmoteSynthetic> smote(const std::vector<std::vector<double>>& minority,
                                  const SmoteConfig& config) {
    require(config.amount_percent % 100 == 0, "smote: amount_percent must be a multiple of 100");
    if (config.amount_percent == 0) return {};
    require(config.k_neighbors > 0, "smote: k_neighbors must be positive");
    require(minority.size() > config.k_neighbors,
            "smote: minority count must exceed k_neighbors");
    const std::size_t dim = minority.front().size();
    for (const auto& p : minority) require(p.size() == dim, "smote: inconsistent dimensions");

    const std::size_t n = minority.size();
    const std::size_t per_point = config.amount_percent / 100;

    // k nearest minority neighbours per point; ties break to the lower index
    std::vector<std::vector<std::size_t>> neighbours(n);
    const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < nn; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dist.emplace_back(sq_dist(minority[i], minority[j]), j);
        }
        std::sort(dist.begin(), dist.end());
        neighbours[i].reserve(config.k_neighbors);
        for (std::size_t k = 0; k < config.k_neighbors; ++k) {
            neighbours[i].push_back(dist[k].second);
        }
    }

    std::vector<SmoteSynthetic> out(n * per_point);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < nn; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        RandomStream stream(derive_seed(config.seed, i));
        for (std::size_t r = 0; r < per_point; ++r) {
            const std::size_t q = neighbours[i][stream.below(config.k_neighbors)];
            const double u = stream.uniform();
            SmoteSynthetic s;
            s.parent_a = i;
            s.parent_b = q;
            s.u = u;
            s.point.resize(dim);
            for (std::size_t c = 0; c < dim; ++c) {
                s.point[c] = minority[i][c] + u * (minority[q][c] - minority[i][c]);
            }
            out[i * per_point + r] = std::move(s);
        }
    }
    return out;
}

}  // namespace triage
