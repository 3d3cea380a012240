// SPDX-License-Identifier: Apache-2.0

#include "triage/mds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "triage/error.hpp"
#include "triage/io_util.hpp"

namespace triage {

Embedding2D classical_mds(const std::vector<double>& distances, std::size_t n) {
    require(distances.size() == n * n, "classical_mds: bad matrix size");
    for (std::size_t i = 0; i < n; ++i) {
        require(distances[i * n + i] == 0.0, "classical_mds: diagonal must be zero");
        for (std::size_t j = i + 1; j < n; ++j) {
            require(distances[i * n + j] >= 0.0, "classical_mds: negative distance");
            const double a = distances[i * n + j], b = distances[j * n + i];
            require(std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b))),
                    "classical_mds: non-symmetric input");
        }
    }

    // B = -1/2 J D^2 J
    Eigen::MatrixXd b(n, n);
    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d2 = distances[i * n + j] * distances[i * n + j];
            row_mean[i] += d2;
            grand += d2;
        }
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n) * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d2 = distances[i * n + j] * distances[i * n + j];
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                -0.5 * (d2 - row_mean[i] - row_mean[j] + grand);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    require(solver.info() == Eigen::Success, "classical_mds: eigensolver failed");

    Embedding2D embedding;
    embedding.coords.assign(n, {0.0, 0.0});
    const auto& values = solver.eigenvalues();  // ascending
    for (std::size_t axis = 0; axis < 2; ++axis) {
        const Eigen::Index k = static_cast<Eigen::Index>(n) - 1 - static_cast<Eigen::Index>(axis);
        if (k < 0 || values(k) <= 0.0) continue;  // fewer positive eigenpairs than axes
        Eigen::VectorXd col = solver.eigenvectors().col(k) * std::sqrt(values(k));
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (std::abs(col(i)) > 1e-12) {
                if (col(i) < 0.0) col = -col;
                break;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            embedding.coords[i][axis] = col(static_cast<Eigen::Index>(i));
        }
    }
    return embedding;
}

std::vector<double> standardized_distance_matrix(const FeatureMatrix& matrix) {
    const std::size_t n = matrix.node_count();
    const std::size_t f = matrix.feature_count();

    // standardize columns; constant columns are dropped
    std::vector<double> mean(f, 0.0), scale(f, 0.0);
    std::vector<bool> keep(f, false);
    for (std::size_t j = 0; j < f; ++j) {
        const auto col = matrix.column(j);
        mean[j] = column_mean(col);
        const double sd = column_stddev(col);
        if (sd > 0.0) {
            scale[j] = 1.0 / sd;
            keep[j] = true;
        }
    }

    std::vector<double> z(n * f, 0.0);
    std::size_t kept = 0;
    for (std::size_t j = 0; j < f; ++j) {
        if (!keep[j]) continue;
        for (std::size_t i = 0; i < n; ++i) {
            z[i * f + kept] = (matrix.at(i, j) - mean[j]) * scale[j];
        }
        ++kept;
    }

    std::vector<double> dist(n * n, 0.0);
    const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t ii = 0; ii < nn; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < kept; ++c) {
                const double d = z[i * f + c] - z[j * f + c];
                s += d * d;
            }
            dist[i * n + j] = std::sqrt(s);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) dist[j * n + i] = dist[i * n + j];
    }
    return dist;
}

std::vector<MapPlotPoint> map_plot_data(const FeatureMatrix& matrix, const ClusterResult& clusters) {
    require(clusters.assignment.size() == matrix.node_count(),
            "map_plot_data: cluster result does not match matrix");
    const auto dist = standardized_distance_matrix(matrix);
    const auto embedding = classical_mds(dist, matrix.node_count());

    std::vector<MapPlotPoint> points;
    points.reserve(matrix.node_count());
    for (std::size_t i = 0; i < matrix.node_count(); ++i) {
        points.push_back({matrix.nodes()[i], embedding.coords[i][0], embedding.coords[i][1],
                          clusters.assignment[i]});
    }
    return points;
}

std::string map_plot_csv(const std::vector<MapPlotPoint>& points) {
    std::string out = "node_id,x,y,cluster\n";
    for (const auto& p : points) {
        out += p.node_id;
        out += ',';
        out += format_double(p.x);
        out += ',';
        out += format_double(p.y);
        out += ',';
        out += std::to_string(p.cluster);
        out += '\n';
    }
    return out;
}

std::string map_plot_svg(const std::vector<MapPlotPoint>& points) {
    static const char* kPalette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                                     "#66ccee", "#aa3377", "#bbbbbb"};
    const double size = 640.0, margin = 32.0;
    double min_x = 0.0, max_x = 1.0, min_y = 0.0, max_y = 1.0;
    if (!points.empty()) {
        min_x = max_x = points[0].x;
        min_y = max_y = points[0].y;
        for (const auto& p : points) {
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
    }
    const double span_x = std::max(max_x - min_x, 1e-12);
    const double span_y = std::max(max_y - min_y, 1e-12);

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
                      "viewBox=\"0 0 640 640\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"640\" fill=\"white\" stroke=\"#444\"/>\n";
    for (const auto& p : points) {
        const double px = margin + (p.x - min_x) / span_x * (size - 2.0 * margin);
        const double py = size - margin - (p.y - min_y) / span_y * (size - 2.0 * margin);
        const char* color = kPalette[static_cast<std::size_t>(std::max(p.cluster - 1, 0)) % 7];
        svg += "<circle cx=\"" + format_double(px) + "\" cy=\"" + format_double(py) +
               "\" r=\"3\" fill=\"" + color + "\" fill-opacity=\"0.75\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace triage
