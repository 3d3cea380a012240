// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "triage/mlp.hpp"
#include "triage/simulate.hpp"
#include "triage/stats.hpp"

namespace triage::ref {

/// Serial reference implementations of the parallel kernels. These are the
/// obviously-correct versions the tests and the benchmark compare against;
/// the OpenMP kernels must reproduce them bit for bit.

FeatureMatrix aggregate(const SampleSet& samples);

FleetSample simulate_fleet(const FleetConfig& config);

std::vector<double> standardized_distance_matrix(const FeatureMatrix& matrix);

std::vector<double> mlp_forward_batch(const MlpModel& model, const std::vector<double>& X,
                                      std::size_t rows, std::size_t cols);

/// Gauss-Jordan inverse with partial pivoting; fails on singular input.
/// This is the independent route against which the eigendecomposition
/// pseudo-inverse is checked.
std::vector<double> gauss_invert(const std::vector<double>& matrix, std::size_t dim);

/// Mahalanobis distances of every node computed with its own mean/covariance
/// accumulation and the explicit Gauss-Jordan inverse.
std::vector<double> mahalanobis_brute(const FeatureMatrix& matrix,
                                      const std::vector<std::size_t>& features);

}  // namespace triage::ref
