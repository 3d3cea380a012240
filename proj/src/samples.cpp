// SPDX-License-Identifier: Apache-2.0

#include "triage/samples.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "triage/catalog.hpp"
#include "triage/error.hpp"
#include "triage/io_util.hpp"

namespace triage {

SampleSet::SampleSet(std::vector<std::string> nodes, std::vector<std::string> apps)
    : nodes_(std::move(nodes)), apps_(std::move(apps)) {
    values_.resize(nodes_.size() * apps_.size());
}

std::optional<std::size_t> SampleSet::node_index(std::string_view id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::optional<std::size_t> SampleSet::app_index(std::string_view token) const {
    for (std::size_t i = 0; i < apps_.size(); ++i) {
        if (apps_[i] == token) return i;
    }
    return std::nullopt;
}

const std::vector<double>& SampleSet::samples(std::size_t node, std::size_t app) const {
    return values_.at(node * apps_.size() + app);
}

std::vector<double>& SampleSet::samples(std::size_t node, std::size_t app) {
    return values_.at(node * apps_.size() + app);
}

std::size_t SampleSet::record_count() const {
    std::size_t n = 0;
    for (const auto& v : values_) n += v.size();
    return n;
}

namespace {

struct RawRecord {
    long long index;
    double value;
    long long line;
};

}  // namespace

SampleSet ingest_samples(std::string_view csv_text, const IngestOptions& options,
                         std::vector<std::string>* warnings) {
    // (node, app) -> records; app key is the raw token
    std::map<std::string, std::map<std::string, std::vector<RawRecord>>> by_node;
    std::set<std::string> apps_seen;
    std::vector<std::string> passthrough_order;

    long long line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos <= csv_text.size()) {
        std::size_t end = csv_text.find('\n', pos);
        if (end == std::string_view::npos) end = csv_text.size();
        std::string_view line = trim(csv_text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (pos > csv_text.size() && line.empty()) break;
        if (line.empty()) continue;

        if (!header_seen) {
            if (line != "node_id,app_id,sample_index,value") {
                fail("line 1: expected header 'node_id,app_id,sample_index,value'");
            }
            header_seen = true;
            continue;
        }

        auto cols = split(line, ',');
        if (cols.size() != 4) {
            fail("line " + std::to_string(line_no) + ": expected 4 columns, got " +
                 std::to_string(cols.size()));
        }
        std::string node(trim(cols[0]));
        std::string app(trim(cols[1]));
        if (node.empty()) fail("line " + std::to_string(line_no) + ": empty node_id");

        if (!catalog::index_of_token(app)) {
            if (!options.allow_unknown_apps) {
                fail("line " + std::to_string(line_no) + ": unknown app_id '" + app + "'");
            }
            if (!apps_seen.count(app)) passthrough_order.push_back(app);
        }
        apps_seen.insert(app);

        auto idx = parse_int(trim(cols[2]));
        if (!idx || *idx < 0) {
            fail("line " + std::to_string(line_no) + ": bad sample_index '" +
                 std::string(cols[2]) + "'");
        }
        auto value = parse_double(trim(cols[3]));
        if (!value) {
            fail("line " + std::to_string(line_no) + ": non-numeric value '" +
                 std::string(cols[3]) + "'");
        }
        if (!std::isfinite(*value) || *value <= 0.0) {
            fail("line " + std::to_string(line_no) + ": non-positive value " +
                 std::string(cols[3]) + " for (" + node + ", " + app + ")");
        }
        by_node[node][app].push_back({*idx, *value, line_no});
    }
    if (!header_seen) fail("empty input: missing CSV header");
    if (by_node.empty()) fail("no sample rows found");

    // app order: catalog order first, then passthrough in first appearance
    std::vector<std::string> apps;
    for (const auto& info : catalog::apps()) {
        if (apps_seen.count(info.token)) apps.push_back(info.token);
    }
    for (const auto& app : passthrough_order) apps.push_back(app);

    // duplicate triples and completeness
    std::vector<std::string> complete_nodes;
    for (auto& [node, per_app] : by_node) {
        for (auto& [app, records] : per_app) {
            std::stable_sort(records.begin(), records.end(),
                             [](const RawRecord& a, const RawRecord& b) { return a.index < b.index; });
            for (std::size_t i = 1; i < records.size(); ++i) {
                if (records[i].index == records[i - 1].index) {
                    fail("line " + std::to_string(records[i].line) + ": duplicate triple (" + node +
                         ", " + app + ", " + std::to_string(records[i].index) + ")");
                }
            }
        }
        std::vector<std::string> missing;
        for (const auto& app : apps) {
            if (!per_app.count(app)) missing.push_back(app);
        }
        if (missing.empty()) {
            complete_nodes.push_back(node);
        } else if (options.allow_missing) {
            if (warnings) {
                std::string list;
                for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
                warnings->push_back("dropped incomplete node '" + node + "' (missing: " + list + ")");
            }
        } else {
            fail("node '" + node + "' has no samples for app '" + missing.front() +
                 "' (rectangular completeness; use allow-missing to drop)");
        }
    }
    if (complete_nodes.empty()) fail("no complete nodes after ingestion");

    SampleSet set(std::move(complete_nodes), std::move(apps));
    for (std::size_t n = 0; n < set.node_count(); ++n) {
        const auto& per_app = by_node.at(set.nodes()[n]);
        for (std::size_t a = 0; a < set.app_count(); ++a) {
            const auto& records = per_app.at(set.apps()[a]);
            auto& dst = set.samples(n, a);
            dst.reserve(records.size());
            for (const auto& r : records) dst.push_back(r.value);
        }
    }
    return set;
}

std::string export_samples_csv(const SampleSet& set) {
    std::string out = "node_id,app_id,sample_index,value\n";
    for (std::size_t n = 0; n < set.node_count(); ++n) {
        for (std::size_t a = 0; a < set.app_count(); ++a) {
            const auto& vals = set.samples(n, a);
            for (std::size_t i = 0; i < vals.size(); ++i) {
                out += set.nodes()[n];
                out += ',';
                out += set.apps()[a];
                out += ',';
                out += std::to_string(i);
                out += ',';
                out += format_double(vals[i]);
                out += '\n';
            }
        }
    }
    return out;
}

}  // namespace triage
