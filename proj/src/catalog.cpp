// SPDX-License-Identifier: Apache-2.0

#include "triage/catalog.hpp"

namespace triage {

const std::string& stat_name(Stat s) {
    static const std::array<std::string, 4> names = {"Min", "Mean", "StdDev", "Max"};
    return names[static_cast<std::size_t>(s)];
}

namespace catalog {

const std::vector<AppInfo>& apps() {
    static const std::vector<AppInfo> table = {
        {"OMP_DGEMM_FMA", "OMP DGEMM", "GFlops/s"},
        {"OMP_DGEMM_LIB", "OMP DGEMM LIB", "GFlops/s"},
        {"OMP_NBODY_FMA", "OMP NBODY", "GFlops/s"},
        {"OMP_MEM_UNOPT", "OMP MEM UNOPT", "GB/s"},
        {"OMP_MEM_OPT", "OMP MEM OPT", "GB/s"},
        {"MPI_DGEMM_A", "MPI DGEMM", "GFlops/s"},
        {"MPI_DGEMM_B", "MPI DGEMMd", "GFlops/s"},
        {"MPI_NBODY_FMA", "MPI NBODY", "GFlops/s"},
        {"MPI_LUFAC", "MPI LUFac", "GFlops/s"},
        {"MPI_DGEMM_UNOPT", "MPI DGEMM UNOPT", "GFlops/s"},
        {"DEFLATED_HPL", "Deflated HPL", "GFlops/s"},
        {"HPL", "HPL", "GFlops/s"},
    };
    return table;
}

std::size_t size() { return apps().size(); }

std::optional<std::size_t> index_of_token(const std::string& token) {
    const auto& table = apps();
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i].token == token) return i;
    }
    return std::nullopt;
}

const AppInfo& app(std::size_t index) { return apps().at(index); }

}  // namespace catalog

std::string feature_name(const FeatureId& f) {
    if (auto idx = catalog::index_of_token(f.app_token)) {
        return catalog::app(*idx).display + " " + stat_name(f.stat);
    }
    return f.app_token + " " + stat_name(f.stat);
}

}  // namespace triage
