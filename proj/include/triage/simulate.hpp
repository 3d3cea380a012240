// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "triage/rng.hpp"
#include "triage/samples.hpp"

namespace triage {

struct GaussComponent {
    double weight;
    double mean;
    double stddev;
};

/// Mixture of Gaussian components plus an optional exponential left tail.
/// The tail is anchored at the lowest component mean: a tail draw is
/// anchor - Exp(rate). Weights must sum to 1 within 1e-9.
struct MixtureSpec {
    std::vector<GaussComponent> components;
    std::optional<std::pair<double, double>> tail;  // (weight, rate)

    double total_weight() const;
    double anchor() const;  // lowest component mean
    double mean() const;    // analytic, ignoring the positivity rejection
    double variance() const;
    double stddev() const;
    void validate() const;
};

/// One strictly positive draw: component chosen by weight, then a Gaussian
/// (or exponential-tail) draw, rejection-resampled to stay positive.
double mixture_sample(const MixtureSpec& spec, RandomStream& stream);

/// Slow-node transform: every component mean (and the tail anchor) shifts
/// down by shift_sigma healthy-population sigmas; stddevs scale by
/// variance_factor.
MixtureSpec shifted_spec(const MixtureSpec& healthy, double shift_sigma, double variance_factor);

/// Default per-app mixtures covering the whole catalog. Multimodal specs
/// keep component separation >= 6 sigma so mode counts are testable; the
/// HPL spec is a single component at 830 GFlops/s with sigma 7.5.
std::map<std::string, MixtureSpec> default_app_mixtures();

struct FleetConfig {
    std::size_t node_count = 9327;
    std::size_t outlier_count = 33;
    std::size_t samples_per_node = 50;
    std::map<std::string, MixtureSpec> app_mixtures = default_app_mixtures();
    double slow_shift_sigma = 3.5;
    double slow_variance_factor = 2.0;
    std::uint64_t seed = 42;

    void validate() const;
};

struct GroundTruth {
    std::vector<std::string> slow_nodes;  // sorted

    bool contains(const std::string& id) const;
};

struct FleetSample {
    SampleSet samples;
    GroundTruth truth;
};

/// Deterministic synthetic fleet: healthy nodes draw from each app's
/// mixture, slow nodes from the shifted spec. Per-node streams derive from
/// (seed, node index), so output is bit-identical regardless of thread
/// count or evaluation order.
FleetSample simulate_fleet(const FleetConfig& config);

std::string export_ground_truth(const GroundTruth& truth);  // one node_id per line
GroundTruth parse_ground_truth(std::string_view text);

/// fleet.toml-style config: [fleet] keys plus per-app [app.<TOKEN>] sections
/// with `components = w:mean:sd, w:mean:sd, ...` and optional
/// `tail = w:rate`. Unlisted apps keep their defaults.
FleetConfig parse_fleet_config(std::string_view text);

}  // namespace triage
