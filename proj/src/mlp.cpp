// SPDX-License-Identifier: Apache-2.0

#include "triage/mlp.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "triage/error.hpp"
#include "triage/io_util.hpp"
#include "triage/rng.hpp"
#include "triage/stats.hpp"

namespace triage {

using ordered_json = nlohmann::ordered_json;

namespace {

// activations per layer for one row; reused across rows
struct Workspace {
    std::vector<std::vector<double>> act;    // act[0] = input, act[L] = output
    std::vector<std::vector<double>> delta;  // d(loss)/d(preactivation)
};

Workspace make_workspace(const std::vector<std::size_t>& sizes) {
    Workspace ws;
    ws.act.resize(sizes.size());
    ws.delta.resize(sizes.size());
    for (std::size_t l = 0; l < sizes.size(); ++l) {
        ws.act[l].assign(sizes[l], 0.0);
        ws.delta[l].assign(sizes[l], 0.0);
    }
    return ws;
}

// forward pass over standardized input already placed in ws.act[0];
// hidden layers rectify, output layer stays linear
void forward(const MlpModel& m, Workspace& ws) {
    const std::size_t layers = m.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        const std::size_t in = m.layer_sizes[l];
        const std::size_t out = m.layer_sizes[l + 1];
        const auto& w = m.weights[l];
        const auto& b = m.biases[l];
        const auto& x = ws.act[l];
        auto& y = ws.act[l + 1];
        for (std::size_t o = 0; o < out; ++o) {
            double s = b[o];
            const double* wr = w.data() + o * in;
            for (std::size_t i = 0; i < in; ++i) s += wr[i] * x[i];
            y[o] = (l + 1 < layers) ? std::max(0.0, s) : s;
        }
    }
}

// backprop of squared error d(pred - target)^2; grads accumulate
void backward(const MlpModel& m, Workspace& ws, double target, double loss_scale,
              std::vector<std::vector<double>>& grad_w, std::vector<std::vector<double>>& grad_b) {
    const std::size_t layers = m.weights.size();
    ws.delta[layers][0] = loss_scale * 2.0 * (ws.act[layers][0] - target);
    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t in = m.layer_sizes[l];
        const std::size_t out = m.layer_sizes[l + 1];
        const auto& x = ws.act[l];
        const auto& d = ws.delta[l + 1];
        auto& gw = grad_w[l];
        auto& gb = grad_b[l];
        for (std::size_t o = 0; o < out; ++o) {
            gb[o] += d[o];
            double* gr = gw.data() + o * in;
            for (std::size_t i = 0; i < in; ++i) gr[i] += d[o] * x[i];
        }
        if (l == 0) break;
        auto& dprev = ws.delta[l];
        for (std::size_t i = 0; i < in; ++i) {
            double s = 0.0;
            for (std::size_t o = 0; o < out; ++o) s += m.weights[l][o * in + i] * d[o];
            // rectifier gate: activation zero means the unit was off
            dprev[i] = (x[i] > 0.0) ? s : 0.0;
        }
    }
}

void load_row(const MlpModel& m, std::span<const double> raw, std::vector<double>& dst) {
    for (std::size_t c = 0; c < raw.size(); ++c) {
        dst[c] = (raw[c] - m.input_mean[c]) * m.input_scale[c];
    }
}

double batch_mse(const MlpModel& m, const std::vector<double>& X, std::size_t rows,
                 std::size_t cols, const std::vector<double>& y, Workspace& ws) {
    double ss = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        load_row(m, {X.data() + r * cols, cols}, ws.act[0]);
        forward(m, ws);
        const double e = ws.act.back()[0] - y[r];
        ss += e * e;
    }
    return ss / static_cast<double>(rows);
}

std::vector<std::vector<double>> zeros_like(const std::vector<std::vector<double>>& v) {
    std::vector<std::vector<double>> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i].assign(v[i].size(), 0.0);
    return out;
}

}  // namespace

MlpTrainResult mlp_train(const std::vector<double>& X, std::size_t rows, std::size_t cols,
                         const std::vector<double>& y, const BoostConfig& boost,
                         const MlpHyper& hyper) {
    require(X.size() == rows * cols, "mlp_train: X size mismatch");
    require(y.size() == rows, "mlp_train: y size mismatch");
    require(rows >= 2 && cols >= 1, "mlp_train: need at least 2 rows and 1 column");

    MlpTrainResult result;

    const double y_mean = column_mean(y);
    const double y_sd = column_stddev(y);
    require(y_sd > 0.0, "mlp_train: degenerate target (constant y)");

    // standardization parameters come from the original rows only
    MlpModel& model = result.model;
    model.seed = hyper.seed;
    model.input_mean.assign(cols, 0.0);
    model.input_scale.assign(cols, 1.0);
    for (std::size_t c = 0; c < cols; ++c) {
        std::vector<double> col(rows);
        for (std::size_t r = 0; r < rows; ++r) col[r] = X[r * cols + c];
        model.input_mean[c] = column_mean(col);
        const double sd = column_stddev(col);
        if (sd > 0.0) model.input_scale[c] = 1.0 / sd;
    }

    // minority rows: target more than sigma_cut sigmas below the mean
    std::vector<std::size_t> minority;
    for (std::size_t r = 0; r < rows; ++r) {
        if (y[r] < y_mean - boost.sigma_cut * y_sd) minority.push_back(r);
    }
    result.minority_count = minority.size();

    std::vector<double> train_x(X);
    std::vector<double> train_y(y);
    const bool can_boost = minority.size() > boost.smote.k_neighbors;
    if (!can_boost && (boost.smote.amount_percent > 0 || boost.duplication_factor > 1)) {
        result.warnings.push_back("minority of " + std::to_string(minority.size()) +
                                  " rows is too small to boost; training without boosting");
    }
    if (can_boost) {
        for (std::size_t copy = 1; copy < boost.duplication_factor; ++copy) {
            for (std::size_t r : minority) {
                train_x.insert(train_x.end(), X.begin() + static_cast<std::ptrdiff_t>(r * cols),
                               X.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
                train_y.push_back(y[r]);
            }
        }
        if (boost.smote.amount_percent > 0) {
            std::vector<std::vector<double>> min_rows;
            min_rows.reserve(minority.size());
            for (std::size_t r : minority) {
                min_rows.emplace_back(X.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                      X.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
            }
            for (const auto& s : smote(min_rows, boost.smote)) {
                train_x.insert(train_x.end(), s.point.begin(), s.point.end());
                const double ya = y[minority[s.parent_a]];
                const double yb = y[minority[s.parent_b]];
                train_y.push_back(ya + s.u * (yb - ya));
            }
        }
    }
    const std::size_t train_rows = train_y.size();
    result.boosted_rows = train_rows;

    // standardize targets for training; folded back into the output layer below
    std::vector<double> ty(train_rows);
    for (std::size_t r = 0; r < train_rows; ++r) ty[r] = (train_y[r] - y_mean) / y_sd;

    model.layer_sizes.clear();
    model.layer_sizes.push_back(cols);
    for (std::size_t h : hyper.hidden) model.layer_sizes.push_back(h);
    model.layer_sizes.push_back(1);

    RandomStream init_stream(derive_seed(hyper.seed, 0x696e6974ULL));  // "init"
    model.weights.resize(model.layer_sizes.size() - 1);
    model.biases.resize(model.layer_sizes.size() - 1);
    for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
        const std::size_t in = model.layer_sizes[l];
        const std::size_t out = model.layer_sizes[l + 1];
        model.weights[l].resize(in * out);
        const double scale = std::sqrt(2.0 / static_cast<double>(in));
        for (auto& w : model.weights[l]) w = init_stream.gaussian(0.0, scale);
        model.biases[l].assign(out, 0.0);
    }

    Workspace ws = make_workspace(model.layer_sizes);
    const std::size_t batch = std::max<std::size_t>(1, std::min(hyper.batch_size, train_rows));
    double lr = hyper.learning_rate;
    require(lr > 0.0, "mlp_train: learning rate must be positive");

    double prev_loss = batch_mse(model, train_x, train_rows, cols, ty, ws);

    std::vector<std::size_t> order(train_rows);
    for (std::size_t i = 0; i < train_rows; ++i) order[i] = i;
    RandomStream shuffle_stream(derive_seed(hyper.seed, 0x73687566ULL));  // "shuf"

    auto grad_w = zeros_like(model.weights);
    auto grad_b = zeros_like(model.biases);

    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        const auto snapshot_w = model.weights;
        const auto snapshot_b = model.biases;

        for (std::size_t i = train_rows; i > 1; --i) {
            const std::size_t j = shuffle_stream.below(i);
            std::swap(order[i - 1], order[j]);
        }

        for (std::size_t start = 0; start < train_rows; start += batch) {
            const std::size_t stop = std::min(start + batch, train_rows);
            const double inv = 1.0 / static_cast<double>(stop - start);
            for (auto& g : grad_w) std::fill(g.begin(), g.end(), 0.0);
            for (auto& g : grad_b) std::fill(g.begin(), g.end(), 0.0);
            for (std::size_t i = start; i < stop; ++i) {
                const std::size_t r = order[i];
                load_row(model, {train_x.data() + r * cols, cols}, ws.act[0]);
                forward(model, ws);
                backward(model, ws, ty[r], inv, grad_w, grad_b);
            }
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                for (std::size_t i = 0; i < model.weights[l].size(); ++i) {
                    model.weights[l][i] -= lr * grad_w[l][i];
                }
                for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
                    model.biases[l][i] -= lr * grad_b[l][i];
                }
            }
        }

        const double loss = batch_mse(model, train_x, train_rows, cols, ty, ws);
        if (loss > prev_loss) {
            // roll the epoch back and retry smaller steps
            model.weights = snapshot_w;
            model.biases = snapshot_b;
            lr *= 0.5;
            result.epoch_losses.push_back(prev_loss);
            if (lr < 1e-14) break;
        } else {
            result.epoch_losses.push_back(loss);
            prev_loss = loss;
        }
    }

    // fold target standardization into the linear output layer
    auto& w_out = model.weights.back();
    auto& b_out = model.biases.back();
    for (auto& w : w_out) w *= y_sd;
    b_out[0] = b_out[0] * y_sd + y_mean;

    return result;
}

double mlp_predict(const MlpModel& model, std::span<const double> x) {
    require(x.size() == model.input_dim(), "mlp_predict: dimension mismatch");
    Workspace ws = make_workspace(model.layer_sizes);
    load_row(model, x, ws.act[0]);
    forward(model, ws);
    return ws.act.back()[0];
}

std::vector<double> mlp_predict_batch(const MlpModel& model, const std::vector<double>& X,
                                      std::size_t rows, std::size_t cols) {
    require(cols == model.input_dim(), "mlp_predict_batch: dimension mismatch");
    require(X.size() == rows * cols, "mlp_predict_batch: X size mismatch");
    std::vector<double> out(rows);
    const std::int64_t nn = static_cast<std::int64_t>(rows);
#pragma omp parallel
    {
        Workspace ws = make_workspace(model.layer_sizes);
#pragma omp for schedule(static)
        for (std::int64_t r = 0; r < nn; ++r) {
            load_row(model, {X.data() + static_cast<std::size_t>(r) * cols, cols}, ws.act[0]);
            forward(model, ws);
            out[static_cast<std::size_t>(r)] = ws.act.back()[0];
        }
    }
    return out;
}

double mlp_gradient_check(const MlpModel& model, const std::vector<double>& X, std::size_t rows,
                          std::size_t cols, const std::vector<double>& y, std::size_t max_params,
                          std::uint64_t seed) {
    require(rows > 0, "mlp_gradient_check: empty batch");
    require(cols == model.input_dim(), "mlp_gradient_check: dimension mismatch");
    require(y.size() == rows, "mlp_gradient_check: y size mismatch");

    MlpModel m = model;
    Workspace ws = make_workspace(m.layer_sizes);

    auto grad_w = zeros_like(m.weights);
    auto grad_b = zeros_like(m.biases);
    const double inv = 1.0 / static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        load_row(m, {X.data() + r * cols, cols}, ws.act[0]);
        forward(m, ws);
        backward(m, ws, y[r], inv, grad_w, grad_b);
    }

    // flat view over (layer, is_bias, index)
    struct ParamRef {
        std::size_t layer;
        bool bias;
        std::size_t index;
    };
    std::vector<ParamRef> params;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        for (std::size_t i = 0; i < m.weights[l].size(); ++i) params.push_back({l, false, i});
        for (std::size_t i = 0; i < m.biases[l].size(); ++i) params.push_back({l, true, i});
    }
    RandomStream stream(derive_seed(seed, 0x67726164ULL));  // "grad"
    if (params.size() > max_params) {
        for (std::size_t i = 0; i < max_params; ++i) {
            const std::size_t j = i + stream.below(params.size() - i);
            std::swap(params[i], params[j]);
        }
        params.resize(max_params);
    }

    const double h = 1e-5;
    double max_rel = 0.0;
    for (const auto& p : params) {
        double& slot = p.bias ? m.biases[p.layer][p.index] : m.weights[p.layer][p.index];
        const double saved = slot;
        slot = saved + h;
        const double up = batch_mse(m, X, rows, cols, y, ws);
        slot = saved - h;
        const double down = batch_mse(m, X, rows, cols, y, ws);
        slot = saved;

        const double numeric = (up - down) / (2.0 * h);
        const double analytic =
            p.bias ? grad_b[p.layer][p.index] : grad_w[p.layer][p.index];
        const double rel = std::abs(analytic - numeric) /
                           std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

std::string mlp_to_json(const MlpModel& model) {
    ordered_json j;
    j["format"] = "triage-mlp";
    j["version"] = 1;
    j["layer_sizes"] = model.layer_sizes;
    j["weights"] = model.weights;
    j["biases"] = model.biases;
    j["input_mean"] = model.input_mean;
    j["input_scale"] = model.input_scale;
    j["seed"] = model.seed;
    return j.dump(2) + "\n";
}

MlpModel mlp_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    require(j.at("format").get<std::string>() == "triage-mlp", "not a triage-mlp model file");
    require(j.at("version").get<int>() == 1, "unsupported model version");
    MlpModel model;
    model.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    model.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    model.input_mean = j.at("input_mean").get<std::vector<double>>();
    model.input_scale = j.at("input_scale").get<std::vector<double>>();
    model.seed = j.at("seed").get<std::uint64_t>();

    require(model.layer_sizes.size() >= 2, "model: need at least two layer sizes");
    require(model.weights.size() == model.layer_sizes.size() - 1 &&
                model.biases.size() == model.weights.size(),
            "model: layer count mismatch");
    for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
        require(model.weights[l].size() == model.layer_sizes[l] * model.layer_sizes[l + 1],
                "model: weight shape mismatch");
        require(model.biases[l].size() == model.layer_sizes[l + 1], "model: bias shape mismatch");
    }
    require(model.input_mean.size() == model.input_dim() &&
                model.input_scale.size() == model.input_dim(),
            "model: standardization shape mismatch");
    return model;
}

QuadrantRule default_quadrant_rule(const std::map<std::string, double>& predicted,
                                   const std::map<std::string, double>& actual) {
    std::vector<double> p, a;
    p.reserve(predicted.size());
    a.reserve(actual.size());
    for (const auto& [id, v] : predicted) p.push_back(v);
    for (const auto& [id, v] : actual) a.push_back(v);
    return {column_mean(p) - 3.0 * column_stddev(p), column_mean(a) - 3.0 * column_stddev(a)};
}

OutlierReport quadrant_outliers(const std::map<std::string, double>& predicted,
                                const std::map<std::string, double>& actual,
                                const QuadrantRule& rule) {
    require(predicted.size() == actual.size(), "quadrant_outliers: node sets differ");
    for (const auto& [id, v] : predicted) {
        require(actual.count(id) == 1, "quadrant_outliers: node '" + id + "' missing from actual");
    }

    OutlierReport report;
    report.method = "nn-quadrant";
    report.threshold = rule.x_cut;
    report.metadata["y_cut"] = format_double(rule.y_cut);
    for (const auto& [id, pred] : predicted) {
        report.universe.push_back(id);
        if (pred < rule.x_cut && actual.at(id) < rule.y_cut) {
            report.flagged.push_back({id, pred, Direction::Below});
        }
    }
    return report;
}

}  // namespace triage
