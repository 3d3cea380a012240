// SPDX-License-Identifier: Apache-2.0

#include "triage/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "triage/catalog.hpp"
#include "triage/error.hpp"
#include "triage/io_util.hpp"

namespace triage {

double MixtureSpec::total_weight() const {
    double w = 0.0;
    for (const auto& c : components) w += c.weight;
    if (tail) w += tail->first;
    return w;
}

double MixtureSpec::anchor() const {
    require(!components.empty(), "mixture needs at least one Gaussian component");
    double a = components.front().mean;
    for (const auto& c : components) a = std::min(a, c.mean);
    return a;
}

double MixtureSpec::mean() const {
    double m = 0.0;
    for (const auto& c : components) m += c.weight * c.mean;
    if (tail) m += tail->first * (anchor() - 1.0 / tail->second);
    return m;
}

double MixtureSpec::variance() const {
    double second = 0.0;
    for (const auto& c : components) {
        second += c.weight * (c.stddev * c.stddev + c.mean * c.mean);
    }
    if (tail) {
        const double tm = anchor() - 1.0 / tail->second;
        const double tv = 1.0 / (tail->second * tail->second);
        second += tail->first * (tv + tm * tm);
    }
    const double m = mean();
    return second - m * m;
}

double MixtureSpec::stddev() const { return std::sqrt(variance()); }

void MixtureSpec::validate() const {
    require(!components.empty(), "mixture needs at least one Gaussian component");
    for (const auto& c : components) {
        require(c.weight >= 0.0, "negative mixture weight");
        require(c.stddev > 0.0, "mixture stddev must be positive");
    }
    if (tail) {
        require(tail->first >= 0.0, "negative tail weight");
        require(tail->second > 0.0, "tail rate must be positive");
    }
    require(std::abs(total_weight() - 1.0) <= 1e-9, "mixture weights must sum to 1");
}

double mixture_sample(const MixtureSpec& spec, RandomStream& stream) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const double pick = stream.uniform();
        double cumulative = 0.0;
        double value = 0.0;
        bool drawn = false;
        for (const auto& c : spec.components) {
            cumulative += c.weight;
            if (pick < cumulative) {
                value = stream.gaussian(c.mean, c.stddev);
                drawn = true;
                break;
            }
        }
        if (!drawn) {
            if (spec.tail) {
                value = spec.anchor() - stream.exponential(spec.tail->second);
            } else {
                // pick landed in the 1e-9 weight slack; use the last component
                const auto& c = spec.components.back();
                value = stream.gaussian(c.mean, c.stddev);
            }
        }
        if (value > 0.0) return value;
    }
    fail("mixture_sample: rejection sampling failed to produce a positive value");
}

MixtureSpec shifted_spec(const MixtureSpec& healthy, double shift_sigma, double variance_factor) {
    const double shift = shift_sigma * healthy.stddev();
    MixtureSpec slow = healthy;
    for (auto& c : slow.components) {
        c.mean -= shift;
        c.stddev *= variance_factor;
    }
    if (slow.tail) slow.tail->second /= variance_factor;  // tail stddev is 1/rate
    return slow;
}

std::map<std::string, MixtureSpec> default_app_mixtures() {
    // Peak placements and weights are synthetic stand-ins; shapes follow the
    // per-app distribution descriptions. Multimodal peaks are separated by
    // at least 6 component sigmas.
    std::map<std::string, MixtureSpec> specs;
    specs["OMP_DGEMM_FMA"] = {{{0.5, 1900, 12}, {0.3, 1820, 12}, {0.2, 1740, 12}}, std::nullopt};
    specs["OMP_DGEMM_LIB"] = {{{1.0, 2050, 25}}, std::nullopt};
    specs["OMP_NBODY_FMA"] = {
        {{0.30, 1760, 10}, {0.25, 1695, 10}, {0.20, 1630, 10}, {0.15, 1565, 10}, {0.10, 1500, 10}},
        std::nullopt};
    specs["OMP_MEM_UNOPT"] = {{{0.97, 84, 2.5}}, std::make_pair(0.03, 0.30)};
    specs["OMP_MEM_OPT"] = {{{0.37, 114, 1.2}, {0.30, 106, 1.2}, {0.20, 98, 1.2}, {0.10, 90, 1.2}},
                            std::make_pair(0.03, 0.15)};
    specs["MPI_DGEMM_A"] = {{{0.85, 1060, 18}, {0.15, 1020, 22}}, std::nullopt};
    specs["MPI_DGEMM_B"] = {{{1.0, 980, 20}}, std::nullopt};
    specs["MPI_NBODY_FMA"] = {{{0.6, 1420, 15}, {0.4, 1300, 15}}, std::nullopt};
    specs["MPI_LUFAC"] = {{{0.5, 700, 10}, {0.5, 640, 10}}, std::nullopt};
    specs["MPI_DGEMM_UNOPT"] = {{{0.5, 620, 9}, {0.5, 560, 9}}, std::nullopt};
    specs["DEFLATED_HPL"] = {{{1.0, 410, 12}}, std::nullopt};
    specs["HPL"] = {{{1.0, 830, 7.5}}, std::nullopt};
    return specs;
}

void FleetConfig::validate() const {
    require(node_count > 0, "node_count must be positive");
    require(outlier_count < node_count, "outlier_count must be below node_count");
    require(samples_per_node > 0, "samples_per_node must be positive");
    require(slow_shift_sigma >= 0.0, "slow_shift_sigma must be non-negative");
    require(slow_variance_factor >= 1.0, "slow_variance_factor must be >= 1");
    for (const auto& info : catalog::apps()) {
        auto it = app_mixtures.find(info.token);
        require(it != app_mixtures.end(), "missing mixture for app " + info.token);
        it->second.validate();
    }
}

bool GroundTruth::contains(const std::string& id) const {
    return std::binary_search(slow_nodes.begin(), slow_nodes.end(), id);
}

namespace {

std::string node_name(std::size_t index, std::size_t node_count) {
    std::size_t width = 4;
    for (std::size_t v = node_count > 0 ? node_count - 1 : 0; v >= 10000; v /= 10) ++width;
    std::string digits = std::to_string(index);
    return "n" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

FleetSample simulate_fleet(const FleetConfig& config) {
    config.validate();

    std::vector<std::string> nodes(config.node_count);
    for (std::size_t i = 0; i < config.node_count; ++i) {
        nodes[i] = node_name(i, config.node_count);
    }

    // slow nodes: deterministic partial Fisher-Yates over node indices
    std::vector<std::size_t> pool(config.node_count);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    RandomStream pick_stream(derive_seed(config.seed, 0x736c6f77ULL));  // "slow"
    std::vector<bool> is_slow(config.node_count, false);
    GroundTruth truth;
    for (std::size_t i = 0; i < config.outlier_count; ++i) {
        const std::uint64_t j = i + pick_stream.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
        is_slow[pool[i]] = true;
        truth.slow_nodes.push_back(nodes[pool[i]]);
    }
    std::sort(truth.slow_nodes.begin(), truth.slow_nodes.end());

    std::vector<std::string> apps;
    for (const auto& info : catalog::apps()) apps.push_back(info.token);

    std::vector<MixtureSpec> healthy(apps.size()), slow(apps.size());
    for (std::size_t a = 0; a < apps.size(); ++a) {
        healthy[a] = config.app_mixtures.at(apps[a]);
        slow[a] = shifted_spec(healthy[a], config.slow_shift_sigma, config.slow_variance_factor);
    }

    SampleSet set(std::move(nodes), std::move(apps));
    const std::int64_t n = static_cast<std::int64_t>(config.node_count);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto node = static_cast<std::size_t>(i);
        RandomStream stream(derive_seed(config.seed, static_cast<std::uint64_t>(node) + 1));
        const auto& specs = is_slow[node] ? slow : healthy;
        for (std::size_t a = 0; a < set.app_count(); ++a) {
            auto& dst = set.samples(node, a);
            dst.resize(config.samples_per_node);
            for (std::size_t s = 0; s < config.samples_per_node; ++s) {
                dst[s] = mixture_sample(specs[a], stream);
            }
        }
    }
    return {std::move(set), std::move(truth)};
}

std::string export_ground_truth(const GroundTruth& truth) {
    std::string out;
    for (const auto& id : truth.slow_nodes) {
        out += id;
        out += '\n';
    }
    return out;
}

GroundTruth parse_ground_truth(std::string_view text) {
    GroundTruth truth;
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (!line.empty()) truth.slow_nodes.emplace_back(line);
    }
    std::sort(truth.slow_nodes.begin(), truth.slow_nodes.end());
    truth.slow_nodes.erase(std::unique(truth.slow_nodes.begin(), truth.slow_nodes.end()),
                           truth.slow_nodes.end());
    return truth;
}

namespace {

std::vector<double> parse_number_tuple(std::string_view text, char sep, std::size_t expect,
                                       const std::string& context) {
    auto parts = split(text, sep);
    if (parts.size() != expect) fail("config: expected " + std::to_string(expect) + " fields in " + context);
    std::vector<double> out;
    for (auto p : parts) {
        auto v = parse_double(trim(p));
        if (!v) fail("config: bad number '" + std::string(p) + "' in " + context);
        out.push_back(*v);
    }
    return out;
}

}  // namespace

FleetConfig parse_fleet_config(std::string_view text) {
    FleetConfig config;
    std::string section;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("config line " + std::to_string(line_no) + ": bad section");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail("config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));

        if (section == "fleet" || section.empty()) {
            auto num = parse_double(value);
            if (!num) fail("config line " + std::to_string(line_no) + ": bad number for " + key);
            if (key == "nodes") {
                config.node_count = static_cast<std::size_t>(*num);
            } else if (key == "outliers") {
                config.outlier_count = static_cast<std::size_t>(*num);
            } else if (key == "samples") {
                config.samples_per_node = static_cast<std::size_t>(*num);
            } else if (key == "seed") {
                config.seed = static_cast<std::uint64_t>(*num);
            } else if (key == "slow_shift_sigma") {
                config.slow_shift_sigma = *num;
            } else if (key == "slow_variance_factor") {
                config.slow_variance_factor = *num;
            } else {
                fail("config line " + std::to_string(line_no) + ": unknown fleet key '" + key + "'");
            }
        } else if (section.starts_with("app.")) {
            const std::string app = section.substr(4);
            if (!catalog::index_of_token(app)) {
                fail("config: unknown app section [" + section + "]");
            }
            auto& spec = config.app_mixtures[app];
            if (key == "components") {
                spec.components.clear();
                for (auto part : split(value, ',')) {
                    auto t = parse_number_tuple(trim(part), ':', 3, "[" + section + "] components");
                    spec.components.push_back({t[0], t[1], t[2]});
                }
            } else if (key == "tail") {
                auto t = parse_number_tuple(value, ':', 2, "[" + section + "] tail");
                spec.tail = std::make_pair(t[0], t[1]);
            } else {
                fail("config line " + std::to_string(line_no) + ": unknown app key '" + key + "'");
            }
        } else {
            fail("config: unknown section [" + section + "]");
        }
    }
    return config;
}

}  // namespace triage
