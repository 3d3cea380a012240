// SPDX-License-Identifier: Apache-2.0

#include "triage/regression.hpp"

#include <algorithm>
#include <cmath>

#include "triage/covariance.hpp"
#include "triage/error.hpp"

namespace triage {

namespace {

struct OlsResult {
    std::vector<double> coefficients;  // per candidate
    double intercept;
    double residual_stddev;
};

OlsResult solve_ols(const FeatureMatrix& matrix, std::size_t target,
                    const std::vector<std::size_t>& features) {
    const std::size_t n = matrix.node_count();
    const std::size_t p = features.size() + 1;  // intercept first

    // normal equations A c = b with A = X^T X, b = X^T y
    std::vector<double> a(p * p, 0.0), b(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(p);
        row[0] = 1.0;
        for (std::size_t j = 0; j < features.size(); ++j) row[j + 1] = matrix.at(i, features[j]);
        const double y = matrix.at(i, target);
        for (std::size_t j = 0; j < p; ++j) {
            b[j] += row[j] * y;
            for (std::size_t k = j; k < p; ++k) a[j * p + k] += row[j] * row[k];
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j + 1; k < p; ++k) a[k * p + j] = a[j * p + k];
    }

    std::vector<double> inv;
    symmetric_pseudo_inverse(a, p, inv);
    std::vector<double> coef(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < p; ++k) coef[j] += inv[j * p + k] * b[k];
    }

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = coef[0];
        for (std::size_t j = 0; j < features.size(); ++j) {
            pred += coef[j + 1] * matrix.at(i, features[j]);
        }
        const double r = matrix.at(i, target) - pred;
        ss += r * r;
    }

    OlsResult result;
    result.intercept = coef[0];
    result.coefficients.assign(coef.begin() + 1, coef.end());
    result.residual_stddev = std::sqrt(ss / static_cast<double>(n));
    return result;
}

}  // namespace

double predict(const RegressionFit& fit, const FeatureMatrix& matrix, std::size_t node) {
    double pred = fit.intercept;
    for (std::size_t j = 0; j < fit.selected.size(); ++j) {
        pred += fit.coefficients[j] * matrix.at(node, fit.selected[j]);
    }
    return pred;
}

RegressionFit fit_regression(const FeatureMatrix& matrix, std::size_t target,
                             const std::vector<std::size_t>& candidates) {
    require(!candidates.empty(), "fit_regression: empty candidate list");
    require(matrix.node_count() >= candidates.size() + 2,
            "fit_regression: need at least candidates+2 nodes");
    require(target < matrix.feature_count(), "fit_regression: target out of range");
    for (std::size_t c : candidates) {
        require(c != target, "fit_regression: target must not be a candidate");
        require(c < matrix.feature_count(), "fit_regression: candidate out of range");
    }

    std::vector<std::size_t> current = candidates;
    OlsResult fit = solve_ols(matrix, target, current);

    // backward elimination: drop the cheapest feature while residual stddev
    // stays within 5% of the current fit
    while (current.size() > 1) {
        double best_sd = 0.0;
        std::size_t best_drop = current.size();
        for (std::size_t drop = 0; drop < current.size(); ++drop) {
            std::vector<std::size_t> reduced;
            reduced.reserve(current.size() - 1);
            for (std::size_t j = 0; j < current.size(); ++j) {
                if (j != drop) reduced.push_back(current[j]);
            }
            const OlsResult trial = solve_ols(matrix, target, reduced);
            if (best_drop == current.size() || trial.residual_stddev < best_sd) {
                best_sd = trial.residual_stddev;
                best_drop = drop;
            }
        }
        if (best_sd > 1.05 * fit.residual_stddev) break;
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(best_drop));
        fit = solve_ols(matrix, target, current);
    }

    RegressionFit out;
    out.selected = current;
    for (std::size_t f : current) out.selected_names.push_back(feature_name(matrix.features()[f]));
    out.coefficients = fit.coefficients;
    out.intercept = fit.intercept;
    out.residual_stddev = fit.residual_stddev;
    return out;
}

}  // namespace triage
