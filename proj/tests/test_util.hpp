// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "triage/rng.hpp"
#include "triage/stats.hpp"

namespace triage::test {

/// Builds a dense matrix from node-major values for hand-crafted fixtures.
inline FeatureMatrix make_matrix(const std::vector<std::string>& nodes,
                                 const std::vector<FeatureId>& features,
                                 const std::vector<double>& values) {
    FeatureMatrix m(nodes, features);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = 0; j < features.size(); ++j) {
            m.at(i, j) = values[i * features.size() + j];
        }
    }
    return m;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("triage_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace triage::test
