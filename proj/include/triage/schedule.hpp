// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "triage/detect.hpp"

namespace triage {

struct PriorityEntry {
    std::string node_id;
    double score;
    int weight;  // 1..1000, best node = 1000
};

/// Total order by descending score, ties by ascending node id; weights are a
/// linear rescale of rank into [1, 1000].
struct NodePriorityList {
    std::vector<PriorityEntry> entries;
};

NodePriorityList priority_order(const std::map<std::string, double>& scores);

/// One `NodeName=<id> Weight=<int>` line per node, in rank order. Byte-stable.
std::string scheduler_weights(const NodePriorityList& list);
std::vector<std::pair<std::string, int>> parse_scheduler_weights(std::string_view text);

enum class Mitigation { Replace, Trim, Interactive, QueueTail, None };

const std::string& mitigation_name(Mitigation m);

/// Severity bands in sigma units (lower bound of each band, exclusive on the
/// right). Defaults: below -5 replace, [-5,-3.5) trim, [-3.5,-2) interactive,
/// [-2,-1) queue_tail, else none.
struct MitigationThresholds {
    double replace_below = -5.0;
    double trim_below = -3.5;
    double interactive_below = -2.0;
    double queue_tail_below = -1.0;
};

struct MitigationPlan {
    std::map<std::string, std::pair<Mitigation, double>> entries;  // node -> (category, sigma)
};

/// Categorizes every below-direction node flagged by any report. Above
/// (fast) outliers never enter the plan. A flagged node without a sigma
/// score is an error.
MitigationPlan mitigation_plan(const std::vector<OutlierReport>& reports,
                               const std::map<std::string, double>& sigma_scores,
                               const MitigationThresholds& thresholds = {});

std::string mitigation_plan_json(const MitigationPlan& plan);

/// Throughput-equivalent node loss when the slowest node gates a fleet-wide
/// synchronous job: fleet_size * slowdown_fraction.
double equivalent_node_loss(std::size_t fleet_size, double slowdown_fraction);

}  // namespace triage
