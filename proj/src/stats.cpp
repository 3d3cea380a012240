// SPDX-License-Identifier: Apache-2.0

#include "triage/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "triage/error.hpp"

namespace triage {

FeatureMatrix::FeatureMatrix(std::vector<std::string> nodes, std::vector<FeatureId> features)
    : nodes_(std::move(nodes)), features_(std::move(features)) {
    data_.assign(nodes_.size() * features_.size(), 0.0);
}

std::optional<std::size_t> FeatureMatrix::feature_index(const FeatureId& id) const {
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (features_[i] == id) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> FeatureMatrix::feature_index(std::string_view name) const {
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (feature_name(features_[i]) == name) return i;
    }
    return std::nullopt;
}

std::size_t FeatureMatrix::require_feature(std::string_view name) const {
    if (auto idx = feature_index(name)) return *idx;
    fail("unknown feature '" + std::string(name) + "'");
}

std::vector<double> FeatureMatrix::column(std::size_t feature) const {
    std::vector<double> out(node_count());
    for (std::size_t i = 0; i < node_count(); ++i) out[i] = at(i, feature);
    return out;
}

namespace {

struct BasicStats {
    double min, mean, stddev, max;
};

// two-pass; fixed accumulation order keeps results thread-count independent
BasicStats basic_stats(std::span<const double> v) {
    double mn = v[0], mx = v[0], sum = 0.0;
    for (double x : v) {
        mn = std::min(mn, x);
        mx = std::max(mx, x);
        sum += x;
    }
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mn, mean, std::sqrt(ss / static_cast<double>(v.size())), mx};
}

double population_variance(std::span<const double> v) {
    const double mean = column_mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size());
}

}  // namespace

FeatureMatrix aggregate(const SampleSet& samples) {
    std::vector<FeatureId> features;
    features.reserve(samples.app_count() * kStats.size());
    for (const auto& app : samples.apps()) {
        for (Stat s : kStats) features.push_back({app, s});
    }
    FeatureMatrix matrix(samples.nodes(), std::move(features));

    const std::int64_t n = static_cast<std::int64_t>(samples.node_count());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto node = static_cast<std::size_t>(i);
        for (std::size_t a = 0; a < samples.app_count(); ++a) {
            const auto st = basic_stats(samples.samples(node, a));
            const std::size_t base = a * kStats.size();
            matrix.at(node, base + 0) = st.min;
            matrix.at(node, base + 1) = st.mean;
            matrix.at(node, base + 2) = st.stddev;
            matrix.at(node, base + 3) = st.max;
        }
    }
    return matrix;
}

double column_mean(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double column_stddev(std::span<const double> v) {
    const double mean = column_mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

double sigma_score(double value, double mean, double stddev) {
    require(stddev > 0.0, "sigma_score: stddev must be positive (constant feature?)");
    return (value - mean) / stddev;
}

namespace {

// type-7 quantile (linear interpolation between closest ranks)
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double idx = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(idx);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = idx - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

NodeSummary summarize_node(const SampleSet& samples, std::size_t node, std::size_t app) {
    std::vector<double> v = samples.samples(node, app);
    require(!v.empty(), "node without samples");
    std::sort(v.begin(), v.end());
    NodeSummary s;
    s.node_id = samples.nodes()[node];
    s.min = v.front();
    s.q1 = quantile_sorted(v, 0.25);
    s.median = quantile_sorted(v, 0.5);
    s.q3 = quantile_sorted(v, 0.75);
    s.max = v.back();
    s.variance = population_variance(v);
    return s;
}

}  // namespace

BoxplotGroups boxplot_groups(const SampleSet& samples, const FeatureMatrix& matrix,
                             const FeatureId& feature, std::size_t bottom, std::size_t middle,
                             std::size_t top) {
    require(bottom > 0 && middle > 0 && top > 0, "boxplot_groups: counts must be positive");
    const std::size_t n = matrix.node_count();
    require(bottom + middle + top <= n, "boxplot_groups: counts exceed fleet size");
    auto fidx = matrix.feature_index(feature);
    if (!fidx) fail("boxplot_groups: unknown feature '" + feature_name(feature) + "'");
    auto app = samples.app_index(feature.app_token);
    if (!app) fail("boxplot_groups: app '" + feature.app_token + "' not in sample set");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = matrix.at(a, *fidx), vb = matrix.at(b, *fidx);
        if (va != vb) return va < vb;
        return matrix.nodes()[a] < matrix.nodes()[b];
    });

    // middle group sits centred in the band left between bottom and top
    const std::size_t band = n - bottom - top - middle;
    const std::size_t mid_start = bottom + (band + 1) / 2;

    BoxplotGroups groups;
    auto emit = [&](std::size_t first, std::size_t count, std::vector<NodeSummary>& out) {
        out.reserve(count);
        for (std::size_t r = first; r < first + count; ++r) {
            out.push_back(summarize_node(samples, order[r], *app));
        }
    };
    emit(0, bottom, groups.bottom);
    emit(mid_start, middle, groups.middle);
    emit(n - top, top, groups.top);
    return groups;
}

std::vector<std::pair<std::size_t, double>> variance_growth(
    const SampleSet& samples, std::string_view node, std::string_view app,
    const std::vector<std::size_t>& batch_sizes) {
    auto ni = samples.node_index(node);
    if (!ni) fail("variance_growth: unknown node '" + std::string(node) + "'");
    auto ai = samples.app_index(app);
    if (!ai) fail("variance_growth: unknown app '" + std::string(app) + "'");
    const auto& v = samples.samples(*ni, *ai);

    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(batch_sizes.size());
    for (std::size_t b : batch_sizes) {
        require(b > 0, "variance_growth: batch size must be positive");
        if (b > v.size()) {
            fail("variance_growth: batch size " + std::to_string(b) + " exceeds available " +
                 std::to_string(v.size()) + " samples");
        }
        out.emplace_back(b, population_variance({v.data(), b}));
    }
    return out;
}

}  // namespace triage
