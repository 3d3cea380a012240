// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "triage/covariance.hpp"
#include "triage/stats.hpp"

namespace triage {

enum class Direction { Below, Above };

const std::string& direction_name(Direction d);

struct Flagged {
    std::string node_id;
    double score;
    Direction direction;
};

/// Flagged node set for one method run. `flagged` holds the actionable
/// (below-direction) nodes; fast outliers land in `informational` and are
/// never merged into mitigation sets. Both lists are sorted by node id.
struct OutlierReport {
    std::string method;
    std::vector<std::string> subset;  // feature names used
    double threshold = 0.0;
    std::vector<Flagged> flagged;
    std::vector<Flagged> informational;
    std::map<std::string, std::string> metadata;
    std::vector<std::string> universe;  // all node ids scored

    std::vector<std::string> flagged_ids() const;
};

std::string report_to_json(const OutlierReport& report);
OutlierReport report_from_json(const std::string& text);

/// Weighted linear screen: flags nodes whose weighted feature sum is
/// strictly below the cutoff.
OutlierReport composite_screen(const FeatureMatrix& matrix,
                               const std::vector<std::pair<std::string, double>>& weights,
                               double cutoff);

/// (MPI DGEMM Min x4) + (MPI DGEMM Mean x2) + MPI NBODY Mean, cutoff 7190.
const std::vector<std::pair<std::string, double>>& default_composite_weights();
inline constexpr double kDefaultCompositeCutoff = 7190.0;
inline constexpr double kDefaultCompositeFastCutoff = 7600.0;

/// Informational list of nodes whose composite exceeds the fast cutoff.
OutlierReport composite_fast_screen(const FeatureMatrix& matrix,
                                    const std::vector<std::pair<std::string, double>>& weights,
                                    double fast_cutoff);

enum class SigmaSide { Below, Above, Both };

/// Flags nodes whose sigma score on one feature column is beyond -/+k on the
/// requested side. The feature column must not be constant.
OutlierReport sigma_outliers(const FeatureMatrix& matrix, const std::string& feature, double k,
                             SigmaSide side);

struct SubsetScanOptions {
    std::size_t min_arity = 2;
    std::size_t max_arity = 2;     // 2..6
    double score_cut = 3.5;        // z-score over the fleet's distance distribution
    std::string primary_feature = "HPL Mean";
    std::vector<std::size_t> candidate_features;  // empty = all matrix columns
};

/// Mahalanobis scan over every feature subset of size min_arity..max_arity
/// (lexicographic over the fixed column order). A node is flagged when its
/// distance z-score exceeds score_cut and its primary-feature value sits
/// below the fleet mean; above-mean nodes go to the informational list.
/// Subset evaluations run in parallel; the result map does not depend on
/// thread count.
std::map<std::vector<std::string>, OutlierReport> subset_outliers(const FeatureMatrix& matrix,
                                                                  const SubsetScanOptions& options);

/// Single-subset variant of the scan above.
OutlierReport mahalanobis_outliers(const FeatureMatrix& matrix,
                                   const std::vector<std::size_t>& features, double score_cut,
                                   const std::string& primary_feature);

}  // namespace triage
