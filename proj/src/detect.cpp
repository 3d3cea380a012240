// SPDX-License-Identifier: Apache-2.0

#include "triage/detect.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "triage/error.hpp"
#include "triage/io_util.hpp"

namespace triage {

using ordered_json = nlohmann::ordered_json;

const std::string& direction_name(Direction d) {
    static const std::string below = "below", above = "above";
    return d == Direction::Below ? below : above;
}

std::vector<std::string> OutlierReport::flagged_ids() const {
    std::vector<std::string> ids;
    ids.reserve(flagged.size());
    for (const auto& f : flagged) ids.push_back(f.node_id);
    return ids;
}

namespace {

ordered_json flagged_json(const std::vector<Flagged>& list) {
    ordered_json arr = ordered_json::array();
    for (const auto& f : list) {
        arr.push_back({{"node", f.node_id}, {"score", f.score},
                       {"direction", direction_name(f.direction)}});
    }
    return arr;
}

std::vector<Flagged> flagged_from_json(const ordered_json& arr) {
    std::vector<Flagged> out;
    for (const auto& item : arr) {
        Flagged f;
        f.node_id = item.at("node").get<std::string>();
        f.score = item.at("score").get<double>();
        f.direction = item.at("direction").get<std::string>() == "above" ? Direction::Above
                                                                         : Direction::Below;
        out.push_back(std::move(f));
    }
    return out;
}

void sort_flagged(std::vector<Flagged>& list) {
    std::sort(list.begin(), list.end(),
              [](const Flagged& a, const Flagged& b) { return a.node_id < b.node_id; });
}

}  // namespace

std::string report_to_json(const OutlierReport& report) {
    ordered_json j;
    j["method"] = report.method;
    j["subset"] = report.subset;
    j["threshold"] = report.threshold;
    j["flagged"] = flagged_json(report.flagged);
    j["informational"] = flagged_json(report.informational);
    j["metadata"] = ordered_json::object();
    for (const auto& [k, v] : report.metadata) j["metadata"][k] = v;
    j["universe"] = report.universe;
    return j.dump(2) + "\n";
}

OutlierReport report_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    OutlierReport report;
    report.method = j.at("method").get<std::string>();
    report.subset = j.at("subset").get<std::vector<std::string>>();
    report.threshold = j.at("threshold").get<double>();
    report.flagged = flagged_from_json(j.at("flagged"));
    if (j.contains("informational")) {
        report.informational = flagged_from_json(j.at("informational"));
    }
    if (j.contains("metadata")) {
        for (const auto& [k, v] : j.at("metadata").items()) {
            report.metadata[k] = v.get<std::string>();
        }
    }
    if (j.contains("universe")) {
        report.universe = j.at("universe").get<std::vector<std::string>>();
    }
    return report;
}

const std::vector<std::pair<std::string, double>>& default_composite_weights() {
    static const std::vector<std::pair<std::string, double>> weights = {
        {"MPI DGEMM Min", 4.0}, {"MPI DGEMM Mean", 2.0}, {"MPI NBODY Mean", 1.0}};
    return weights;
}

namespace {

std::vector<double> composite_values(const FeatureMatrix& matrix,
                                     const std::vector<std::pair<std::string, double>>& weights) {
    std::vector<std::pair<std::size_t, double>> terms;
    terms.reserve(weights.size());
    for (const auto& [name, coeff] : weights) {
        terms.emplace_back(matrix.require_feature(name), coeff);
    }
    std::vector<double> values(matrix.node_count());
    for (std::size_t i = 0; i < matrix.node_count(); ++i) {
        double sum = 0.0;
        for (const auto& [f, c] : terms) sum += c * matrix.at(i, f);
        values[i] = sum;
    }
    return values;
}

std::vector<std::string> weight_names(const std::vector<std::pair<std::string, double>>& weights) {
    std::vector<std::string> names;
    for (const auto& [name, coeff] : weights) names.push_back(name);
    return names;
}

}  // namespace

OutlierReport composite_screen(const FeatureMatrix& matrix,
                               const std::vector<std::pair<std::string, double>>& weights,
                               double cutoff) {
    const auto values = composite_values(matrix, weights);
    const double mean = column_mean(values);

    OutlierReport report;
    report.method = "composite";
    report.subset = weight_names(weights);
    report.threshold = cutoff;
    report.universe = matrix.nodes();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < cutoff) {
            report.flagged.push_back({matrix.nodes()[i], values[i],
                                      values[i] < mean ? Direction::Below : Direction::Above});
        }
    }
    sort_flagged(report.flagged);
    return report;
}

OutlierReport composite_fast_screen(const FeatureMatrix& matrix,
                                    const std::vector<std::pair<std::string, double>>& weights,
                                    double fast_cutoff) {
    const auto values = composite_values(matrix, weights);

    OutlierReport report;
    report.method = "composite-fast";
    report.subset = weight_names(weights);
    report.threshold = fast_cutoff;
    report.universe = matrix.nodes();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > fast_cutoff) {
            report.flagged.push_back({matrix.nodes()[i], values[i], Direction::Above});
        }
    }
    sort_flagged(report.flagged);
    return report;
}

OutlierReport sigma_outliers(const FeatureMatrix& matrix, const std::string& feature, double k,
                             SigmaSide side) {
    require(k >= 0.0, "sigma_outliers: k must be non-negative");
    const std::size_t f = matrix.require_feature(feature);
    const auto column = matrix.column(f);
    const double mean = column_mean(column);
    const double sd = column_stddev(column);
    require(sd > 0.0, "sigma_outliers: constant feature column '" + feature + "'");

    OutlierReport report;
    report.method = "sigma";
    report.subset = {feature};
    report.threshold = k;
    report.universe = matrix.nodes();
    for (std::size_t i = 0; i < column.size(); ++i) {
        const double z = (column[i] - mean) / sd;
        if ((side == SigmaSide::Below || side == SigmaSide::Both) && z < -k) {
            report.flagged.push_back({matrix.nodes()[i], z, Direction::Below});
        } else if ((side == SigmaSide::Above || side == SigmaSide::Both) && z > k) {
            report.flagged.push_back({matrix.nodes()[i], z, Direction::Above});
        }
    }
    sort_flagged(report.flagged);
    return report;
}

OutlierReport mahalanobis_outliers(const FeatureMatrix& matrix,
                                   const std::vector<std::size_t>& features, double score_cut,
                                   const std::string& primary_feature) {
    const std::size_t primary = matrix.require_feature(primary_feature);
    const auto primary_column = matrix.column(primary);
    const double primary_mean = column_mean(primary_column);

    const CovarianceModel model = fit_covariance(matrix, features);
    const auto distances = mahalanobis_all(matrix, model);
    const double dist_mean = column_mean(distances);
    const double dist_sd = column_stddev(distances);

    OutlierReport report;
    report.method = "mahalanobis";
    report.subset = model.feature_names;
    report.threshold = score_cut;
    report.universe = matrix.nodes();
    report.metadata["distance_mean"] = format_double(dist_mean);
    report.metadata["distance_stddev"] = format_double(dist_sd);
    if (model.effective_rank < model.dim()) report.metadata["rank_deficient"] = "true";

    if (dist_sd > 0.0) {
        for (std::size_t i = 0; i < distances.size(); ++i) {
            const double z = (distances[i] - dist_mean) / dist_sd;
            if (z > score_cut) {
                const bool below = primary_column[i] < primary_mean;
                auto& list = below ? report.flagged : report.informational;
                list.push_back({matrix.nodes()[i], distances[i],
                                below ? Direction::Below : Direction::Above});
            }
        }
    } else {
        report.metadata["degenerate_distances"] = "true";
    }
    sort_flagged(report.flagged);
    sort_flagged(report.informational);
    return report;
}

std::map<std::vector<std::string>, OutlierReport> subset_outliers(const FeatureMatrix& matrix,
                                                                  const SubsetScanOptions& options) {
    require(options.min_arity >= 2, "subset scan: arity starts at 2");
    require(options.max_arity >= options.min_arity && options.max_arity <= 6,
            "subset scan: max arity must lie in 2..6");
    std::vector<std::size_t> candidates = options.candidate_features;
    if (candidates.empty()) {
        candidates.resize(matrix.feature_count());
        for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
    }
    require(options.max_arity <= candidates.size(), "subset scan: arity exceeds feature count");
    matrix.require_feature(options.primary_feature);

    // lexicographic enumeration, materialized so subsets can be scanned in parallel
    std::vector<std::vector<std::size_t>> subsets;
    for (std::size_t arity = options.min_arity; arity <= options.max_arity; ++arity) {
        std::vector<std::size_t> pick(arity);
        for (std::size_t i = 0; i < arity; ++i) pick[i] = i;
        while (true) {
            std::vector<std::size_t> subset(arity);
            for (std::size_t i = 0; i < arity; ++i) subset[i] = candidates[pick[i]];
            subsets.push_back(std::move(subset));

            std::size_t i = arity;
            while (i > 0 && pick[i - 1] == candidates.size() - arity + i - 1) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t j = i; j < arity; ++j) pick[j] = pick[j - 1] + 1;
        }
    }

    std::vector<OutlierReport> reports(subsets.size());
    const std::int64_t count = static_cast<std::int64_t>(subsets.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t s = 0; s < count; ++s) {
        reports[static_cast<std::size_t>(s)] =
            mahalanobis_outliers(matrix, subsets[static_cast<std::size_t>(s)], options.score_cut,
                                 options.primary_feature);
    }

    std::map<std::vector<std::string>, OutlierReport> out;
    for (auto& report : reports) {
        auto key = report.subset;
        out.emplace(std::move(key), std::move(report));
    }
    return out;
}

}  // namespace triage
