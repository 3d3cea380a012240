// SPDX-License-Identifier: Apache-2.0

#include "triage/evaluate.hpp"

#include <algorithm>
#include <sstream>

#include "triage/error.hpp"
#include "triage/io_util.hpp"

namespace triage {

ConfusionMatrix confusion(const std::set<std::string>& predicted,
                          const std::set<std::string>& truth,
                          const std::set<std::string>& universe) {
    for (const auto& id : predicted) {
        require(universe.count(id) == 1, "confusion: predicted node '" + id + "' not in universe");
    }
    for (const auto& id : truth) {
        require(universe.count(id) == 1, "confusion: truth node '" + id + "' not in universe");
    }
    ConfusionMatrix cm;
    for (const auto& id : predicted) {
        if (truth.count(id)) {
            ++cm.tp;
        } else {
            ++cm.fp;
        }
    }
    cm.fn = truth.size() - cm.tp;
    cm.tn = universe.size() - predicted.size() - cm.fn;
    return cm;
}

double error_rate(const ConfusionMatrix& cm) {
    require(cm.total() > 0, "error_rate: empty universe");
    return static_cast<double>(cm.fp + cm.fn) / static_cast<double>(cm.total());
}

MethodComparison compare_methods(const std::vector<MethodEntry>& entries,
                                 const std::set<std::string>& truth,
                                 const std::set<std::string>& universe) {
    require(!entries.empty(), "compare_methods: no entries");
    MethodComparison comparison;
    for (const auto& entry : entries) {
        MethodScore score;
        score.method = entry.method;
        score.subset = entry.subset;
        score.cm = confusion(entry.predicted, truth, universe);
        score.error_rate_value = error_rate(score.cm);
        score.recall = truth.empty() ? 0.0
                                     : static_cast<double>(score.cm.tp) /
                                           static_cast<double>(truth.size());
        const std::size_t denom = score.cm.tp + score.cm.fp;
        score.precision = denom == 0 ? 0.0
                                     : static_cast<double>(score.cm.tp) /
                                           static_cast<double>(denom);
        comparison.rows.push_back(std::move(score));
    }
    std::stable_sort(comparison.rows.begin(), comparison.rows.end(),
                     [](const MethodScore& a, const MethodScore& b) {
                         if (a.recall != b.recall) return a.recall > b.recall;
                         return a.cm.fp < b.cm.fp;
                     });
    return comparison;
}

namespace {

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string comparison_text(const MethodComparison& comparison) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"method", "subset", "tp", "fp", "fn", "tn", "error_rate", "recall",
                     "precision"});
    for (const auto& r : comparison.rows) {
        cells.push_back({r.method, r.subset, std::to_string(r.cm.tp), std::to_string(r.cm.fp),
                         std::to_string(r.cm.fn), std::to_string(r.cm.tn),
                         fixed3(r.error_rate_value), fixed3(r.recall), fixed3(r.precision)});
    }
    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += row[c];
            if (c + 1 < row.size()) out += std::string(width[c] - row[c].size() + 2, ' ');
        }
        out += '\n';
    }
    return out;
}

std::string comparison_csv(const MethodComparison& comparison) {
    std::string out = "method,subset,tp,fp,fn,tn,error_rate,recall,precision\n";
    for (const auto& r : comparison.rows) {
        std::string subset = r.subset;
        std::replace(subset.begin(), subset.end(), ',', ';');
        out += r.method + "," + subset + "," + std::to_string(r.cm.tp) + "," +
               std::to_string(r.cm.fp) + "," + std::to_string(r.cm.fn) + "," +
               std::to_string(r.cm.tn) + "," + format_double(r.error_rate_value) + "," +
               format_double(r.recall) + "," + format_double(r.precision) + "\n";
    }
    return out;
}

std::string render_confusion(const ConfusionMatrix& cm) {
    std::vector<std::vector<std::string>> cells = {
        {"", "Positive Label", "Negative Label"},
        {"Predicted Positive", std::to_string(cm.tp), std::to_string(cm.fp)},
        {"Predicted Negative", std::to_string(cm.fn), std::to_string(cm.tn)},
    };
    std::vector<std::size_t> width(3, 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < 3; ++c) {
            out += row[c];
            if (c + 1 < 3) out += std::string(width[c] - row[c].size() + 2, ' ');
        }
        out += '\n';
    }
    return out;
}

}  // namespace triage
