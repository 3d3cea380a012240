// SPDX-License-Identifier: Apache-2.0

#include "triage/covariance.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "triage/error.hpp"

namespace triage {

std::size_t symmetric_pseudo_inverse(const std::vector<double>& matrix, std::size_t dim,
                                     std::vector<double>& inverse) {
    require(matrix.size() == dim * dim, "pseudo_inverse: size mismatch");
    Eigen::MatrixXd s(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = matrix[i * dim + j];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    require(solver.info() == Eigen::Success, "pseudo_inverse: eigensolver failed");

    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();
    const double lambda_max = std::max(0.0, values.maxCoeff());
    const double floor = 1e-10 * lambda_max;

    Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    std::size_t rank = 0;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        if (values(k) > floor && values(k) > 0.0) {
            inv += (1.0 / values(k)) * vectors.col(k) * vectors.col(k).transpose();
            ++rank;
        }
    }
    inverse.resize(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            inverse[i * dim + j] = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return rank;
}

CovarianceModel fit_covariance(const FeatureMatrix& matrix,
                               const std::vector<std::size_t>& features) {
    const std::size_t n = matrix.node_count();
    const std::size_t d = features.size();
    require(n >= 2, "fit_covariance: need at least 2 nodes");
    require(d >= 1, "fit_covariance: need at least 1 feature");
    for (std::size_t f : features) {
        require(f < matrix.feature_count(), "fit_covariance: feature index out of range");
    }

    CovarianceModel model;
    model.feature_indices = features;
    for (std::size_t f : features) {
        model.feature_names.push_back(feature_name(matrix.features()[f]));
    }

    model.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += matrix.at(i, features[j]);
    }
    for (double& m : model.mean) m /= static_cast<double>(n);

    // population covariance, accumulated in fixed node order
    model.covariance.assign(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dj = matrix.at(i, features[j]) - model.mean[j];
            for (std::size_t k = j; k < d; ++k) {
                const double dk = matrix.at(i, features[k]) - model.mean[k];
                model.covariance[j * d + k] += dj * dk;
            }
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j; k < d; ++k) {
            const double v = model.covariance[j * d + k] / static_cast<double>(n);
            model.covariance[j * d + k] = v;
            model.covariance[k * d + j] = v;
        }
    }

    model.effective_rank = symmetric_pseudo_inverse(model.covariance, d, model.pseudo_inverse);
    return model;
}

double mahalanobis_distance(std::span<const double> x, const CovarianceModel& model) {
    const std::size_t d = model.dim();
    require(x.size() == d, "mahalanobis_distance: dimension mismatch");
    double quad = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double dj = x[j] - model.mean[j];
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            acc += model.pseudo_inverse[j * d + k] * (x[k] - model.mean[k]);
        }
        quad += dj * acc;
    }
    return std::sqrt(std::max(0.0, quad));
}

std::vector<double> mahalanobis_all(const FeatureMatrix& matrix, const CovarianceModel& model) {
    const std::size_t n = matrix.node_count();
    const std::size_t d = model.dim();
    std::vector<double> distances(n);
    const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < nn; ++i) {
        const auto node = static_cast<std::size_t>(i);
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j) x[j] = matrix.at(node, model.feature_indices[j]);
        distances[node] = mahalanobis_distance(x, model);
    }
    return distances;
}

}  // namespace triage
