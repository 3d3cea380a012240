// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <set>
#include <string>
#include <vector>

namespace triage {

struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
};

/// Set arithmetic against ground truth; predicted and truth must both be
/// subsets of the universe.
ConfusionMatrix confusion(const std::set<std::string>& predicted,
                          const std::set<std::string>& truth,
                          const std::set<std::string>& universe);

/// (fp + fn) / total.
double error_rate(const ConfusionMatrix& cm);

struct MethodScore {
    std::string method;
    std::string subset;
    ConfusionMatrix cm;
    double error_rate_value = 0.0;
    double recall = 0.0;
    double precision = 0.0;
};

struct MethodEntry {
    std::string method;
    std::string subset;
    std::set<std::string> predicted;
};

/// Rows sorted by descending recall, ties by ascending false positives.
struct MethodComparison {
    std::vector<MethodScore> rows;
};

MethodComparison compare_methods(const std::vector<MethodEntry>& entries,
                                 const std::set<std::string>& truth,
                                 const std::set<std::string>& universe);

std::string comparison_text(const MethodComparison& comparison);
std::string comparison_csv(const MethodComparison& comparison);

/// Two-by-two table in the customary predicted-by-actual orientation.
std::string render_confusion(const ConfusionMatrix& cm);

}  // namespace triage
