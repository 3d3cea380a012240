// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "triage/kmeans.hpp"
#include "triage/stats.hpp"

namespace triage {

/// 2D distance-preserving embedding, centred on the origin.
struct Embedding2D {
    std::vector<std::array<double, 2>> coords;
};

/// Classical (Torgerson) multidimensional scaling: double-centre -1/2 D^2,
/// take the top eigenpairs with positive eigenvalue, scale eigenvectors by
/// sqrt(eigenvalue). Sign convention: the first non-zero loading of each
/// axis is positive. `distances` is a symmetric row-major n x n matrix with
/// zero diagonal.
Embedding2D classical_mds(const std::vector<double>& distances, std::size_t n);

struct MapPlotPoint {
    std::string node_id;
    double x, y;
    int cluster;
};

/// Standardizes columns (constant columns dropped), builds the Euclidean
/// distance matrix, embeds with classical_mds and joins cluster labels.
std::vector<MapPlotPoint> map_plot_data(const FeatureMatrix& matrix, const ClusterResult& clusters);

/// Row-major Euclidean distance matrix of the standardized features.
/// Assembly is parallel by row and thread-count independent.
std::vector<double> standardized_distance_matrix(const FeatureMatrix& matrix);

std::string map_plot_csv(const std::vector<MapPlotPoint>& points);
std::string map_plot_svg(const std::vector<MapPlotPoint>& points);

}  // namespace triage
