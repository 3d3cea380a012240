// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triage/catalog.hpp"
#include "triage/samples.hpp"

namespace triage {

/// Dense node x feature table. Columns are ordered app-major (SampleSet app
/// order, i.e. catalog order) crossed with (Min, Mean, StdDev, Max); the
/// ordering is fixed so outputs are byte-stable across runs.
class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> nodes, std::vector<FeatureId> features);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t feature_count() const { return features_.size(); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<FeatureId>& features() const { return features_; }

    double at(std::size_t node, std::size_t feature) const {
        return data_[node * features_.size() + feature];
    }
    double& at(std::size_t node, std::size_t feature) {
        return data_[node * features_.size() + feature];
    }
    std::span<const double> row(std::size_t node) const {
        return {data_.data() + node * features_.size(), features_.size()};
    }

    std::optional<std::size_t> feature_index(const FeatureId& id) const;
    /// Lookup by display name, e.g. "MPI DGEMM Min".
    std::optional<std::size_t> feature_index(std::string_view name) const;
    std::size_t require_feature(std::string_view name) const;

    std::vector<double> column(std::size_t feature) const;

private:
    std::vector<std::string> nodes_;
    std::vector<FeatureId> features_;
    std::vector<double> data_;
};

/// Min/Mean/StdDev/Max per (node, app) over that node's samples. StdDev uses
/// the population denominator n. Parallel over nodes; per-node results do not
/// depend on thread count.
FeatureMatrix aggregate(const SampleSet& samples);

double column_mean(std::span<const double> v);
double column_stddev(std::span<const double> v);  // population

/// (value - mean) / stddev; stddev must be positive.
double sigma_score(double value, double mean, double stddev);

struct NodeSummary {
    std::string node_id;
    double min, q1, median, q3, max;  // five-number summary of raw samples
    double variance;                  // population
};

struct BoxplotGroups {
    std::vector<NodeSummary> bottom, middle, top;
};

/// Ranks nodes ascending by the chosen feature column (the paper ranks by the
/// app's Mean), takes the lowest `bottom`, the `middle` nodes centred in the
/// band left between bottom and top groups, and the highest `top`. Ranking
/// ties break by node_id ascending. Summaries come from raw samples of the
/// feature's app.
BoxplotGroups boxplot_groups(const SampleSet& samples, const FeatureMatrix& matrix,
                             const FeatureId& feature, std::size_t bottom, std::size_t middle,
                             std::size_t top);

/// Population variance of the first b samples for each requested batch size;
/// prefixes are taken in sample_index order.
std::vector<std::pair<std::size_t, double>> variance_growth(const SampleSet& samples,
                                                            std::string_view node,
                                                            std::string_view app,
                                                            const std::vector<std::size_t>& batch_sizes);

}  // namespace triage
