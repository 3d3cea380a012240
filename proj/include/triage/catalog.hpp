// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace triage {

/// Per-node, per-app aggregate statistics. Declaration order is the feature
/// column order and is part of the output format contract.
enum class Stat { Min, Mean, StdDev, Max };

inline constexpr std::array<Stat, 4> kStats = {Stat::Min, Stat::Mean, Stat::StdDev, Stat::Max};

const std::string& stat_name(Stat s);

/// The closed set of benchmark applications. `token` is the spelling used in
/// sample CSV files; `display` is the spelling used in feature names and
/// report tables ("MPI DGEMM Min"). Compute apps report GFlops/s, memory
/// apps GB/s.
struct AppInfo {
    std::string token;
    std::string display;
    std::string unit;
};

namespace catalog {

const std::vector<AppInfo>& apps();
std::size_t size();
std::optional<std::size_t> index_of_token(const std::string& token);
const AppInfo& app(std::size_t index);

}  // namespace catalog

/// One feature column: (application, statistic).
struct FeatureId {
    std::string app_token;
    Stat stat;

    bool operator==(const FeatureId&) const = default;
};

/// Display name, e.g. "MPI DGEMM Mean". Unknown tokens render as
/// "<token> <stat>".
std::string feature_name(const FeatureId& f);

}  // namespace triage
