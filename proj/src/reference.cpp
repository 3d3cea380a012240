// SPDX-License-Identifier: Apache-2.0

#include "triage/reference.hpp"

#include <algorithm>
#include <cmath>

#include "triage/catalog.hpp"
#include "triage/error.hpp"
#include "triage/rng.hpp"

namespace triage::ref {

FeatureMatrix aggregate(const SampleSet& samples) {
    std::vector<FeatureId> features;
    for (const auto& app : samples.apps()) {
        for (Stat s : kStats) features.push_back({app, s});
    }
    FeatureMatrix matrix(samples.nodes(), std::move(features));
    for (std::size_t node = 0; node < samples.node_count(); ++node) {
        for (std::size_t a = 0; a < samples.app_count(); ++a) {
            const auto& v = samples.samples(node, a);
            double mn = v[0], mx = v[0], sum = 0.0;
            for (double x : v) {
                mn = std::min(mn, x);
                mx = std::max(mx, x);
                sum += x;
            }
            const double mean = sum / static_cast<double>(v.size());
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            const std::size_t base = a * kStats.size();
            matrix.at(node, base + 0) = mn;
            matrix.at(node, base + 1) = mean;
            matrix.at(node, base + 2) = std::sqrt(ss / static_cast<double>(v.size()));
            matrix.at(node, base + 3) = mx;
        }
    }
    return matrix;
}

FleetSample simulate_fleet(const FleetConfig& config) {
    config.validate();

    std::vector<std::string> nodes(config.node_count);
    for (std::size_t i = 0; i < config.node_count; ++i) {
        std::size_t width = 4;
        for (std::size_t v = config.node_count - 1; v >= 10000; v /= 10) ++width;
        std::string digits = std::to_string(i);
        nodes[i] = "n" + std::string(width - std::min(width, digits.size()), '0') + digits;
    }

    std::vector<std::size_t> pool(config.node_count);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    RandomStream pick_stream(derive_seed(config.seed, 0x736c6f77ULL));
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
    for (std::size_t node = 0; node < config.node_count; ++node) {
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

std::vector<double> standardized_distance_matrix(const FeatureMatrix& matrix) {
    const std::size_t n = matrix.node_count();
    const std::size_t f = matrix.feature_count();
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
        for (std::size_t i = 0; i < n; ++i) z[i * f + kept] = (matrix.at(i, j) - mean[j]) * scale[j];
        ++kept;
    }
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < kept; ++c) {
                const double d = z[i * f + c] - z[j * f + c];
                s += d * d;
            }
            dist[i * n + j] = std::sqrt(s);
            dist[j * n + i] = dist[i * n + j];
        }
    }
    return dist;
}

std::vector<double> mlp_forward_batch(const MlpModel& model, const std::vector<double>& X,
                                      std::size_t rows, std::size_t cols) {
    require(cols == model.input_dim(), "ref::mlp_forward_batch: dimension mismatch");
    std::vector<double> out(rows);
    std::vector<std::vector<double>> act(model.layer_sizes.size());
    for (std::size_t l = 0; l < model.layer_sizes.size(); ++l) act[l].assign(model.layer_sizes[l], 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            act[0][c] = (X[r * cols + c] - model.input_mean[c]) * model.input_scale[c];
        }
        const std::size_t layers = model.weights.size();
        for (std::size_t l = 0; l < layers; ++l) {
            const std::size_t in = model.layer_sizes[l];
            const std::size_t outn = model.layer_sizes[l + 1];
            for (std::size_t o = 0; o < outn; ++o) {
                double s = model.biases[l][o];
                for (std::size_t i = 0; i < in; ++i) s += model.weights[l][o * in + i] * act[l][i];
                act[l + 1][o] = (l + 1 < layers) ? std::max(0.0, s) : s;
            }
        }
        out[r] = act.back()[0];
    }
    return out;
}

std::vector<double> gauss_invert(const std::vector<double>& matrix, std::size_t dim) {
    require(matrix.size() == dim * dim, "gauss_invert: size mismatch");
    // augmented [A | I], row-reduced with partial pivoting
    std::vector<double> a(matrix);
    std::vector<double> inv(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) inv[i * dim + i] = 1.0;

    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < dim; ++r) {
            if (std::abs(a[r * dim + col]) > std::abs(a[pivot * dim + col])) pivot = r;
        }
        require(std::abs(a[pivot * dim + col]) > 1e-300, "gauss_invert: singular matrix");
        if (pivot != col) {
            for (std::size_t c = 0; c < dim; ++c) {
                std::swap(a[pivot * dim + c], a[col * dim + c]);
                std::swap(inv[pivot * dim + c], inv[col * dim + c]);
            }
        }
        const double p = a[col * dim + col];
        for (std::size_t c = 0; c < dim; ++c) {
            a[col * dim + c] /= p;
            inv[col * dim + c] /= p;
        }
        for (std::size_t r = 0; r < dim; ++r) {
            if (r == col) continue;
            const double factor = a[r * dim + col];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < dim; ++c) {
                a[r * dim + c] -= factor * a[col * dim + c];
                inv[r * dim + c] -= factor * inv[col * dim + c];
            }
        }
    }
    return inv;
}

std::vector<double> mahalanobis_brute(const FeatureMatrix& matrix,
                                      const std::vector<std::size_t>& features) {
    const std::size_t n = matrix.node_count();
    const std::size_t d = features.size();

    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += matrix.at(i, features[j]);
    }
    for (double& m : mean) m /= static_cast<double>(n);

    std::vector<double> cov(d * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < d; ++k) {
                cov[j * d + k] += (matrix.at(i, features[j]) - mean[j]) *
                                  (matrix.at(i, features[k]) - mean[k]);
            }
        }
    }
    for (double& c : cov) c /= static_cast<double>(n);

    const auto inv = gauss_invert(cov, d);
    std::vector<double> distances(n);
    for (std::size_t i = 0; i < n; ++i) {
        double quad = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < d; ++k) {
                quad += (matrix.at(i, features[j]) - mean[j]) * inv[j * d + k] *
                        (matrix.at(i, features[k]) - mean[k]);
            }
        }
        distances[i] = std::sqrt(std::max(0.0, quad));
    }
    return distances;
}

}  // namespace triage::ref
