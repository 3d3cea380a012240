// SPDX-License-Identifier: Apache-2.0

#include "triage/schedule.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <nlohmann/json.hpp>

#include "triage/error.hpp"
#include "triage/io_util.hpp"

namespace triage {

NodePriorityList priority_order(const std::map<std::string, double>& scores) {
    require(!scores.empty(), "priority_order: no scores");
    NodePriorityList list;
    list.entries.reserve(scores.size());
    for (const auto& [id, score] : scores) {
        require(std::isfinite(score), "priority_order: non-finite score for node '" + id + "'");
        list.entries.push_back({id, score, 0});
    }
    std::sort(list.entries.begin(), list.entries.end(),
              [](const PriorityEntry& a, const PriorityEntry& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.node_id < b.node_id;
              });
    const std::size_t n = list.entries.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double frac = n == 1 ? 0.0
                                   : static_cast<double>(i) * 999.0 / static_cast<double>(n - 1);
        list.entries[i].weight = 1000 - static_cast<int>(std::lround(frac));
    }
    return list;
}

std::string scheduler_weights(const NodePriorityList& list) {
    std::string out;
    for (const auto& e : list.entries) {
        out += "NodeName=" + e.node_id + " Weight=" + std::to_string(e.weight) + "\n";
    }
    return out;
}

std::vector<std::pair<std::string, int>> parse_scheduler_weights(std::string_view text) {
    std::vector<std::pair<std::string, int>> out;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty()) continue;
        auto parts = split(line, ' ');
        if (parts.size() != 2 || !parts[0].starts_with("NodeName=") ||
            !parts[1].starts_with("Weight=")) {
            fail("weight file line " + std::to_string(line_no) + ": expected NodeName=.. Weight=..");
        }
        auto weight = parse_int(parts[1].substr(7));
        if (!weight) fail("weight file line " + std::to_string(line_no) + ": bad weight");
        out.emplace_back(std::string(parts[0].substr(9)), static_cast<int>(*weight));
    }
    return out;
}

const std::string& mitigation_name(Mitigation m) {
    static const std::array<std::string, 5> names = {"replace", "trim", "interactive",
                                                     "queue_tail", "none"};
    return names[static_cast<std::size_t>(m)];
}

MitigationPlan mitigation_plan(const std::vector<OutlierReport>& reports,
                               const std::map<std::string, double>& sigma_scores,
                               const MitigationThresholds& thresholds) {
    MitigationPlan plan;
    for (const auto& report : reports) {
        for (const auto& f : report.flagged) {
            if (f.direction != Direction::Below) continue;
            auto it = sigma_scores.find(f.node_id);
            if (it == sigma_scores.end()) {
                fail("mitigation_plan: no sigma score for flagged node '" + f.node_id + "'");
            }
            const double s = it->second;
            Mitigation category = Mitigation::None;
            if (s < thresholds.replace_below) {
                category = Mitigation::Replace;
            } else if (s < thresholds.trim_below) {
                category = Mitigation::Trim;
            } else if (s < thresholds.interactive_below) {
                category = Mitigation::Interactive;
            } else if (s < thresholds.queue_tail_below) {
                category = Mitigation::QueueTail;
            }
            plan.entries[f.node_id] = {category, s};
        }
    }
    return plan;
}

std::string mitigation_plan_json(const MitigationPlan& plan) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [node, entry] : plan.entries) {
        j[node] = {{"category", mitigation_name(entry.first)}, {"sigma", entry.second}};
    }
    return j.dump(2) + "\n";
}

double equivalent_node_loss(std::size_t fleet_size, double slowdown_fraction) {
    require(slowdown_fraction >= 0.0 && slowdown_fraction < 1.0,
            "equivalent_node_loss: slowdown fraction must lie in [0, 1)");
    return static_cast<double>(fleet_size) * slowdown_fraction;
}

}  // namespace triage
