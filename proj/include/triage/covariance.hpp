// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "triage/stats.hpp"

namespace triage {

/// Mean vector, covariance matrix (population) and its eigendecomposition
/// pseudo-inverse over a selected feature subset. Matrices are row-major
/// dim x dim. Eigenvalues below 1e-10 * lambda_max are zeroed, so collinear
/// feature subsets are handled without failure; effective_rank counts the
/// eigenvalues kept.
struct CovarianceModel {
    std::vector<std::size_t> feature_indices;
    std::vector<std::string> feature_names;
    std::vector<double> mean;
    std::vector<double> covariance;
    std::vector<double> pseudo_inverse;
    std::size_t effective_rank = 0;

    std::size_t dim() const { return mean.size(); }
};

/// Fits mean and covariance over all nodes of the matrix, restricted to the
/// given feature columns. Requires at least 2 nodes and 1 feature.
CovarianceModel fit_covariance(const FeatureMatrix& matrix,
                               const std::vector<std::size_t>& features);

/// sqrt((x - M)^T S^- (x - M)); zero iff x - M lies in the null space of S^-.
double mahalanobis_distance(std::span<const double> x, const CovarianceModel& model);

/// Distance of every node's feature sub-vector to the model. Parallel over
/// nodes; results are independent of thread count.
std::vector<double> mahalanobis_all(const FeatureMatrix& matrix, const CovarianceModel& model);

/// Pseudo-inverse of a symmetric row-major matrix via eigendecomposition,
/// zeroing eigenvalues below 1e-10 * lambda_max. Returns effective rank.
std::size_t symmetric_pseudo_inverse(const std::vector<double>& matrix, std::size_t dim,
                                     std::vector<double>& inverse);

}  // namespace triage
