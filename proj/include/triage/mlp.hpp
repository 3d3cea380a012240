// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "triage/detect.hpp"
#include "triage/smote.hpp"

namespace triage {

/// Fully connected regression network with rectified-linear hidden layers
/// and a linear output. Weights are row-major (out x in). Inputs are
/// standardized with the stored per-feature mean/scale.
struct MlpModel {
    std::vector<std::size_t> layer_sizes;  // [input, hidden..., 1]
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    std::vector<double> input_mean;
    std::vector<double> input_scale;
    std::uint64_t seed = 0;

    std::size_t input_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
};

struct MlpHyper {
    std::vector<std::size_t> hidden = {300, 40};
    double learning_rate = 0.01;
    std::size_t epochs = 40;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
};

/// Minority boosting for regression training: rows whose target sits more
/// than sigma_cut population sigmas below the target mean get duplicated
/// (duplication_factor - 1 extra copies) and SMOTE-oversampled; a synthetic
/// target is the same interpolation of its parents' targets.
struct BoostConfig {
    double sigma_cut = 3.0;
    std::size_t duplication_factor = 1;
    SmoteConfig smote{5, 300, 0};
};

struct MlpTrainResult {
    MlpModel model;
    std::vector<double> epoch_losses;  // accepted per-epoch MSE, standardized targets
    std::size_t minority_count = 0;
    std::size_t boosted_rows = 0;      // training rows after boosting
    std::vector<std::string> warnings;
};

/// Mini-batch SGD on mean squared error; single-threaded and deterministic
/// given the seed. The learning rate halves (and the epoch is rolled back)
/// whenever an epoch would increase the full-set loss, so the recorded loss
/// sequence is non-increasing.
MlpTrainResult mlp_train(const std::vector<double>& X, std::size_t rows, std::size_t cols,
                         const std::vector<double>& y, const BoostConfig& boost,
                         const MlpHyper& hyper);

double mlp_predict(const MlpModel& model, std::span<const double> x);

/// Forward pass per row; parallel over rows, bit-identical at any thread count.
std::vector<double> mlp_predict_batch(const MlpModel& model, const std::vector<double>& X,
                                      std::size_t rows, std::size_t cols);

/// Max relative error between backprop gradients and central finite
/// differences (step 1e-5) on up to max_params randomly sampled parameters.
double mlp_gradient_check(const MlpModel& model, const std::vector<double>& X, std::size_t rows,
                          std::size_t cols, const std::vector<double>& y,
                          std::size_t max_params = 200, std::uint64_t seed = 7);

std::string mlp_to_json(const MlpModel& model);
MlpModel mlp_from_json(const std::string& text);

struct QuadrantRule {
    double x_cut;  // predicted-value threshold
    double y_cut;  // actual-value threshold
};

/// mean - 3 sigma on each axis.
QuadrantRule default_quadrant_rule(const std::map<std::string, double>& predicted,
                                   const std::map<std::string, double>& actual);

/// Flags nodes in the lower-left quadrant: predicted < x_cut AND actual < y_cut.
OutlierReport quadrant_outliers(const std::map<std::string, double>& predicted,
                                const std::map<std::string, double>& actual,
                                const QuadrantRule& rule);

}  // namespace triage
