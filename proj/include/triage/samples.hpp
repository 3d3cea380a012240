// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace triage {

/// Raw per-node, per-application benchmark samples. Nodes are kept sorted by
/// id and apps in catalog order (passthrough apps, when allowed, follow in
/// first-appearance order), so the structure is independent of input row
/// order. Values per (node, app) are stored in sample_index order.
class SampleSet {
public:
    SampleSet() = default;
    SampleSet(std::vector<std::string> nodes, std::vector<std::string> apps);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t app_count() const { return apps_.size(); }
    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<std::string>& apps() const { return apps_; }

    std::optional<std::size_t> node_index(std::string_view id) const;
    std::optional<std::size_t> app_index(std::string_view token) const;

    const std::vector<double>& samples(std::size_t node, std::size_t app) const;
    std::vector<double>& samples(std::size_t node, std::size_t app);

    std::size_t record_count() const;

private:
    std::vector<std::string> nodes_;
    std::vector<std::string> apps_;
    std::vector<std::vector<double>> values_;  // node-major
};

struct IngestOptions {
    bool allow_unknown_apps = false;  // passthrough for app ids outside the catalog
    bool allow_missing = false;       // drop nodes lacking samples for some app
};

/// Parses the `node_id,app_id,sample_index,value` CSV schema. Errors carry
/// the 1-based line number. With allow_missing, incomplete nodes are dropped
/// and reported through `warnings`.
SampleSet ingest_samples(std::string_view csv_text, const IngestOptions& options = {},
                         std::vector<std::string>* warnings = nullptr);

/// Inverse of ingest_samples for complete sets; sample indexes are emitted
/// as 0..k-1 in stored order. Byte-stable.
std::string export_samples_csv(const SampleSet& set);

}  // namespace triage
