// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "triage/stats.hpp"

namespace triage {

struct RegressionFit {
    std::vector<std::size_t> selected;       // surviving feature columns
    std::vector<std::string> selected_names;
    std::vector<double> coefficients;        // one per selected feature
    double intercept = 0.0;
    double residual_stddev = 0.0;            // population, on training data
};

double predict(const RegressionFit& fit, const FeatureMatrix& matrix, std::size_t node);

/// Ordinary least squares (normal equations, pseudo-inverse) followed by
/// greedy backward elimination: repeatedly drop the candidate whose removal
/// least increases residual stddev, while the increase stays within 5%.
/// Collinear candidates resolve to a minimum-norm solution.
RegressionFit fit_regression(const FeatureMatrix& matrix, std::size_t target,
                             const std::vector<std::size_t>& candidates);

}  // namespace triage
