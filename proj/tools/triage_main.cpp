// SPDX-License-Identifier: Apache-2.0
//
// triage: fleet node-health screening toolkit.
// Subcommands wire simulate -> ingest -> analyze -> evaluate -> schedule
// into reproducible, manifest-tracked pipelines.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <set>

#include <nlohmann/json.hpp>

#include "triage/detect.hpp"
#include "triage/error.hpp"
#include "triage/evaluate.hpp"
#include "triage/io_util.hpp"
#include "triage/kmeans.hpp"
#include "triage/manifest.hpp"
#include "triage/mds.hpp"
#include "triage/mlp.hpp"
#include "triage/parallel.hpp"
#include "triage/regression.hpp"
#include "triage/samples.hpp"
#include "triage/schedule.hpp"
#include "triage/simulate.hpp"
#include "triage/stats.hpp"

namespace fs = std::filesystem;
using namespace triage;

namespace {

struct GlobalFlags {
    std::string out_dir = "out";
    int threads = 0;
};

void write_output(RunManifest& manifest, const fs::path& path, std::string_view content) {
    write_file(path, content);
    manifest.add_output(path, content);
}

void finish(const GlobalFlags& g, RunManifest& manifest) {
    const fs::path path = fs::path(g.out_dir) / (manifest.command + ".manifest.json");
    write_file(path, manifest_json(manifest));
}

SampleSet load_samples(RunManifest& manifest, const std::string& path, bool allow_missing,
                       bool allow_unknown) {
    const std::string text = read_file(path);
    manifest.add_input(path, text);
    IngestOptions options;
    options.allow_missing = allow_missing;
    options.allow_unknown_apps = allow_unknown;
    std::vector<std::string> warnings;
    SampleSet set = ingest_samples(text, options, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return set;
}

std::vector<std::string> parse_feature_list(const std::string& arg) {
    std::vector<std::string> names;
    for (auto part : split(arg, ',')) {
        auto name = trim(part);
        if (!name.empty()) names.emplace_back(name);
    }
    return names;
}

// X = every non-HPL feature, y = HPL Mean
struct NnDataset {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::size_t> feature_indices;
    std::size_t rows = 0, cols = 0;
};

NnDataset nn_dataset(const FeatureMatrix& matrix) {
    NnDataset ds;
    for (std::size_t j = 0; j < matrix.feature_count(); ++j) {
        if (matrix.features()[j].app_token != "HPL") ds.feature_indices.push_back(j);
    }
    require(!ds.feature_indices.empty(), "no non-HPL features available");
    const std::size_t target = matrix.require_feature("HPL Mean");
    ds.rows = matrix.node_count();
    ds.cols = ds.feature_indices.size();
    ds.x.resize(ds.rows * ds.cols);
    ds.y.resize(ds.rows);
    for (std::size_t i = 0; i < ds.rows; ++i) {
        for (std::size_t j = 0; j < ds.cols; ++j) {
            ds.x[i * ds.cols + j] = matrix.at(i, ds.feature_indices[j]);
        }
        ds.y[i] = matrix.at(i, target);
    }
    return ds;
}

std::string scan_to_json(const std::map<std::vector<std::string>, OutlierReport>& scan) {
    nlohmann::ordered_json j;
    j["method"] = "mahalanobis-scan";
    j["reports"] = nlohmann::ordered_json::array();
    for (const auto& [subset, report] : scan) {
        j["reports"].push_back(nlohmann::ordered_json::parse(report_to_json(report)));
    }
    return j.dump(2) + "\n";
}

int cmd_simulate(const GlobalFlags& g, const std::string& config_path, std::size_t nodes,
                 std::size_t outliers, std::size_t samples, std::uint64_t seed, bool have_nodes,
                 bool have_outliers, bool have_samples, bool have_seed) {
    FleetConfig config;
    std::string config_text;
    if (!config_path.empty()) {
        config_text = read_file(config_path);
        config = parse_fleet_config(config_text);
    }
    if (have_nodes) config.node_count = nodes;
    if (have_outliers) config.outlier_count = outliers;
    if (have_samples) config.samples_per_node = samples;
    if (have_seed) config.seed = seed;

    RunManifest manifest = make_manifest("simulate", config.seed, config_text);
    if (!config_path.empty()) manifest.add_input(config_path, config_text);

    const FleetSample fleet = simulate_fleet(config);
    write_output(manifest, fs::path(g.out_dir) / "samples.csv", export_samples_csv(fleet.samples));
    write_output(manifest, fs::path(g.out_dir) / "ground_truth.txt",
                 export_ground_truth(fleet.truth));
    finish(g, manifest);
    std::cout << "simulated " << config.node_count << " nodes (" << config.outlier_count
              << " slow), " << config.samples_per_node << " samples per app\n";
    return 0;
}

std::string features_csv(const FeatureMatrix& matrix) {
    std::string out = "node_id";
    for (const auto& f : matrix.features()) out += "," + feature_name(f);
    out += '\n';
    for (std::size_t i = 0; i < matrix.node_count(); ++i) {
        out += matrix.nodes()[i];
        for (std::size_t j = 0; j < matrix.feature_count(); ++j) {
            out += ',' + format_double(matrix.at(i, j));
        }
        out += '\n';
    }
    return out;
}

int cmd_ingest(const GlobalFlags& g, const std::string& input, bool allow_missing,
               bool allow_unknown) {
    RunManifest manifest = make_manifest("ingest", 0, "");
    const SampleSet set = load_samples(manifest, input, allow_missing, allow_unknown);
    const FeatureMatrix matrix = aggregate(set);
    write_output(manifest, fs::path(g.out_dir) / "features.csv", features_csv(matrix));
    finish(g, manifest);
    std::cout << "ingested " << set.node_count() << " nodes x " << set.app_count() << " apps ("
              << set.record_count() << " samples)\n";
    return 0;
}

struct AnalyzeFlags {
    std::string input;
    std::string method;
    std::string features;
    std::string feature = "HPL Mean";  // sigma method column
    std::string primary = "HPL Mean";
    std::string side = "below";
    std::size_t max_arity = 0;
    double sigma = 3.5;
    double cutoff = kDefaultCompositeCutoff;
    double fast_cutoff = 0.0;
    std::size_t k = 3;
    std::uint64_t seed = 1;
    std::size_t epochs = 40;
    double learning_rate = 0.01;
    std::size_t batch_size = 32;
    std::size_t smote_percent = 300;
    double minority_sigma = 3.0;
    std::string save_model;
    bool force = false;
    bool allow_missing = false;
};

int cmd_analyze(const GlobalFlags& g, const AnalyzeFlags& f) {
    RunManifest manifest = make_manifest("analyze-" + f.method, f.seed, f.method);
    const SampleSet set = load_samples(manifest, f.input, f.allow_missing, false);
    const FeatureMatrix matrix = aggregate(set);
    const fs::path dir(g.out_dir);

    if (f.method == "composite") {
        const auto report = composite_screen(matrix, default_composite_weights(), f.cutoff);
        write_output(manifest, dir / "report_composite.json", report_to_json(report));
        if (f.fast_cutoff > 0.0) {
            const auto fast =
                composite_fast_screen(matrix, default_composite_weights(), f.fast_cutoff);
            write_output(manifest, dir / "report_composite_fast.json", report_to_json(fast));
        }
        std::cout << "composite screen flagged " << report.flagged.size() << " nodes\n";
    } else if (f.method == "sigma") {
        SigmaSide side = SigmaSide::Below;
        if (f.side == "above") side = SigmaSide::Above;
        else if (f.side == "both") side = SigmaSide::Both;
        else require(f.side == "below", "unknown --side (below|above|both)");
        const auto report = sigma_outliers(matrix, f.feature, f.sigma, side);
        write_output(manifest, dir / "report_sigma.json", report_to_json(report));
        std::cout << "sigma screen flagged " << report.flagged.size() << " nodes\n";
    } else if (f.method == "mahalanobis") {
        const auto names = parse_feature_list(f.features);
        if (f.max_arity == 0) {
            require(!names.empty(),
                    "mahalanobis needs --features \"A,B\" or --max-arity for a subset scan");
            std::vector<std::size_t> subset;
            for (const auto& name : names) subset.push_back(matrix.require_feature(name));
            const auto report = mahalanobis_outliers(matrix, subset, f.sigma, f.primary);
            write_output(manifest, dir / "report_mahalanobis.json", report_to_json(report));
            std::cout << "mahalanobis flagged " << report.flagged.size() << " nodes\n";
        } else {
            SubsetScanOptions options;
            options.max_arity = f.max_arity;
            options.score_cut = f.sigma;
            options.primary_feature = f.primary;
            for (const auto& name : names) {
                options.candidate_features.push_back(matrix.require_feature(name));
            }
            const std::size_t pool =
                options.candidate_features.empty() ? matrix.feature_count()
                                                   : options.candidate_features.size();
            double count = 0;
            for (std::size_t arity = 2; arity <= f.max_arity; ++arity) {
                double c = 1;
                for (std::size_t i = 0; i < arity; ++i) {
                    c *= static_cast<double>(pool - i) / static_cast<double>(i + 1);
                }
                count += c;
            }
            require(count <= 200000 || f.force,
                    "scan of " + std::to_string(static_cast<long long>(count)) +
                        " subsets; pass --force or restrict --features");
            const auto scan = subset_outliers(matrix, options);
            write_output(manifest, dir / "scan_mahalanobis.json", scan_to_json(scan));
            std::cout << "scanned " << scan.size() << " feature subsets\n";
        }
    } else if (f.method == "nn") {
        const auto ds = nn_dataset(matrix);
        BoostConfig boost;
        boost.sigma_cut = f.minority_sigma;
        boost.smote.amount_percent = f.smote_percent;
        boost.smote.seed = f.seed;
        MlpHyper hyper;
        hyper.learning_rate = f.learning_rate;
        hyper.epochs = f.epochs;
        hyper.batch_size = f.batch_size;
        hyper.seed = f.seed;
        const auto trained = mlp_train(ds.x, ds.rows, ds.cols, ds.y, boost, hyper);
        for (const auto& w : trained.warnings) std::cerr << "warning: " << w << "\n";

        const auto predictions = mlp_predict_batch(trained.model, ds.x, ds.rows, ds.cols);
        std::map<std::string, double> predicted, actual;
        for (std::size_t i = 0; i < ds.rows; ++i) {
            predicted[matrix.nodes()[i]] = predictions[i];
            actual[matrix.nodes()[i]] = ds.y[i];
        }
        const auto rule = default_quadrant_rule(predicted, actual);
        auto report = quadrant_outliers(predicted, actual, rule);
        report.metadata["epochs"] = std::to_string(trained.epoch_losses.size());
        report.metadata["minority_count"] = std::to_string(trained.minority_count);
        write_output(manifest, dir / "report_nn.json", report_to_json(report));

        std::string pred_csv = "node_id,predicted,actual\n";
        for (std::size_t i = 0; i < ds.rows; ++i) {
            pred_csv += matrix.nodes()[i] + ',' + format_double(predictions[i]) + ',' +
                        format_double(ds.y[i]) + '\n';
        }
        write_output(manifest, dir / "predictions.csv", pred_csv);
        if (!f.save_model.empty()) {
            write_output(manifest, f.save_model, mlp_to_json(trained.model));
        }
        std::cout << "nn quadrant rule flagged " << report.flagged.size() << " nodes\n";
    } else if (f.method == "kmeans-map") {
        const auto clusters = kmeans(matrix, f.k, f.seed);
        const auto points = map_plot_data(matrix, clusters);
        write_output(manifest, dir / "map.csv", map_plot_csv(points));
        write_output(manifest, dir / "map.svg", map_plot_svg(points));
        std::cout << "kmeans (k=" << f.k << ") inertia " << format_double(clusters.inertia)
                  << ", map plot written\n";
    } else {
        fail("unknown method '" + f.method + "' (composite|sigma|mahalanobis|nn|kmeans-map)");
    }
    finish(g, manifest);
    return 0;
}

int cmd_evaluate(const GlobalFlags& g, const std::vector<std::string>& report_paths,
                 const std::string& truth_path) {
    RunManifest manifest = make_manifest("evaluate", 0, "");
    const std::string truth_text = read_file(truth_path);
    manifest.add_input(truth_path, truth_text);
    const GroundTruth truth = parse_ground_truth(truth_text);
    const std::set<std::string> truth_set(truth.slow_nodes.begin(), truth.slow_nodes.end());

    std::vector<MethodEntry> entries;
    std::set<std::string> universe;
    auto add_report = [&](const OutlierReport& report) {
        MethodEntry entry;
        entry.method = report.method;
        std::string subset;
        for (const auto& s : report.subset) subset += (subset.empty() ? "" : " + ") + s;
        entry.subset = subset;
        for (const auto& id : report.flagged_ids()) entry.predicted.insert(id);
        universe.insert(report.universe.begin(), report.universe.end());
        entries.push_back(std::move(entry));
    };
    for (const auto& path : report_paths) {
        const std::string text = read_file(path);
        manifest.add_input(path, text);
        const auto j = nlohmann::ordered_json::parse(text);
        if (j.contains("reports")) {
            for (const auto& r : j.at("reports")) add_report(report_from_json(r.dump()));
        } else {
            add_report(report_from_json(text));
        }
    }
    require(!entries.empty(), "no reports given");
    universe.insert(truth_set.begin(), truth_set.end());

    const auto comparison = compare_methods(entries, truth_set, universe);
    const std::string text = comparison_text(comparison);
    write_output(manifest, fs::path(g.out_dir) / "comparison.txt", text);
    write_output(manifest, fs::path(g.out_dir) / "comparison.csv", comparison_csv(comparison));
    finish(g, manifest);
    std::cout << text;
    return 0;
}

int cmd_schedule(const GlobalFlags& g, const std::string& input, const std::string& by,
                 const std::string& model_path, const std::vector<std::string>& report_paths,
                 bool allow_missing) {
    RunManifest manifest = make_manifest("schedule", 0, by);
    const SampleSet set = load_samples(manifest, input, allow_missing, false);
    const FeatureMatrix matrix = aggregate(set);

    std::map<std::string, double> scores;
    if (by == "nn-prediction") {
        require(!model_path.empty(), "schedule --by nn-prediction needs --model");
        const std::string model_text = read_file(model_path);
        manifest.add_input(model_path, model_text);
        const MlpModel model = mlp_from_json(model_text);
        const auto ds = nn_dataset(matrix);
        require(ds.cols == model.input_dim(), "model input dimension does not match samples");
        const auto predictions = mlp_predict_batch(model, ds.x, ds.rows, ds.cols);
        for (std::size_t i = 0; i < ds.rows; ++i) scores[matrix.nodes()[i]] = predictions[i];
    } else {
        const std::size_t column = matrix.require_feature(by);
        for (std::size_t i = 0; i < matrix.node_count(); ++i) {
            scores[matrix.nodes()[i]] = matrix.at(i, column);
        }
    }

    const auto list = priority_order(scores);
    write_output(manifest, fs::path(g.out_dir) / "node_weights.txt", scheduler_weights(list));

    // sigma scores of the chosen metric drive the mitigation bands
    std::vector<double> values;
    values.reserve(scores.size());
    for (const auto& [id, v] : scores) values.push_back(v);
    const double mean = column_mean(values);
    const double sd = column_stddev(values);
    std::map<std::string, double> sigma_scores;
    for (const auto& [id, v] : scores) {
        sigma_scores[id] = sd > 0.0 ? (v - mean) / sd : 0.0;
    }
    std::vector<OutlierReport> reports;
    for (const auto& path : report_paths) {
        const std::string text = read_file(path);
        manifest.add_input(path, text);
        reports.push_back(report_from_json(text));
    }
    const auto plan = mitigation_plan(reports, sigma_scores);
    write_output(manifest, fs::path(g.out_dir) / "mitigation.json", mitigation_plan_json(plan));
    finish(g, manifest);
    std::cout << "ordered " << list.entries.size() << " nodes; " << plan.entries.size()
              << " in mitigation plan\n";
    return 0;
}

int cmd_report(const GlobalFlags& g, const std::string& input,
               const std::vector<std::string>& report_paths, bool allow_missing) {
    RunManifest manifest = make_manifest("report", 0, "");
    const SampleSet set = load_samples(manifest, input, allow_missing, false);
    const FeatureMatrix matrix = aggregate(set);

    std::string out;
    out += "fleet: " + std::to_string(set.node_count()) + " nodes, " +
           std::to_string(set.app_count()) + " apps, " + std::to_string(set.record_count()) +
           " samples\n\n";
    out += "per-app fleet statistics (of per-node means):\n";
    for (std::size_t a = 0; a < set.app_count(); ++a) {
        const auto idx = matrix.feature_index(FeatureId{set.apps()[a], Stat::Mean});
        const auto col = matrix.column(*idx);
        const auto info_idx = catalog::index_of_token(set.apps()[a]);
        const std::string unit = info_idx ? catalog::app(*info_idx).unit : "";
        out += "  " + feature_name(matrix.features()[*idx]) + ": mean " +
               format_double(column_mean(col)) + " stddev " + format_double(column_stddev(col)) +
               (unit.empty() ? "" : " " + unit) + "\n";
    }
    if (!report_paths.empty()) {
        out += "\nreports:\n";
        for (const auto& path : report_paths) {
            const std::string text = read_file(path);
            manifest.add_input(path, text);
            const auto report = report_from_json(text);
            std::string subset;
            for (const auto& s : report.subset) subset += (subset.empty() ? "" : " + ") + s;
            out += "  " + report.method + (subset.empty() ? "" : " [" + subset + "]") + ": " +
                   std::to_string(report.flagged.size()) + " flagged, " +
                   std::to_string(report.informational.size()) + " informational\n";
        }
    }
    write_output(manifest, fs::path(g.out_dir) / "summary.txt", out);
    finish(g, manifest);
    std::cout << out;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fleet node-health triage toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "OpenMP thread count (0 = runtime default)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic fleet");
    std::string sim_config;
    std::size_t sim_nodes = 0, sim_outliers = 0, sim_samples = 0;
    std::uint64_t sim_seed = 0;
    auto* sim_nodes_opt = sim->add_option("--nodes", sim_nodes, "fleet size");
    auto* sim_outliers_opt = sim->add_option("--outliers", sim_outliers, "slow nodes to inject");
    auto* sim_samples_opt = sim->add_option("--samples", sim_samples, "samples per node per app");
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "fleet seed");
    sim->add_option("--config", sim_config, "fleet.toml-style config file");

    // ingest
    auto* ing = app.add_subcommand("ingest", "validate samples and emit the feature matrix");
    std::string ing_input;
    bool ing_allow_missing = false, ing_allow_unknown = false;
    ing->add_option("--input", ing_input, "samples CSV")->required();
    ing->add_flag("--allow-missing", ing_allow_missing, "drop incomplete nodes with a warning");
    ing->add_flag("--allow-unknown-apps", ing_allow_unknown, "pass through unknown app ids");

    // analyze
    auto* ana = app.add_subcommand("analyze", "run a detector over a samples file");
    AnalyzeFlags af;
    ana->add_option("--input", af.input, "samples CSV")->required();
    ana->add_option("--method", af.method, "composite|sigma|mahalanobis|nn|kmeans-map")->required();
    ana->add_option("--features", af.features, "comma-separated feature names");
    ana->add_option("--feature", af.feature, "feature column for the sigma method")
        ->capture_default_str();
    ana->add_option("--primary", af.primary, "primary feature for outlier direction")
        ->capture_default_str();
    ana->add_option("--side", af.side, "sigma side: below|above|both")->capture_default_str();
    ana->add_option("--max-arity", af.max_arity, "subset scan arity (2..6)");
    ana->add_option("--sigma", af.sigma, "sigma / distance z-score cut")->capture_default_str();
    ana->add_option("--cutoff", af.cutoff, "composite cutoff")->capture_default_str();
    ana->add_option("--fast-cutoff", af.fast_cutoff,
                    "also emit an informational fast-node report above this composite value");
    ana->add_option("--k", af.k, "cluster count for kmeans-map")->capture_default_str();
    ana->add_option("--seed", af.seed, "seed for nn/kmeans")->capture_default_str();
    ana->add_option("--epochs", af.epochs, "nn training epochs")->capture_default_str();
    ana->add_option("--learning-rate", af.learning_rate, "nn learning rate")
        ->capture_default_str();
    ana->add_option("--batch", af.batch_size, "nn mini-batch size")->capture_default_str();
    ana->add_option("--smote-percent", af.smote_percent, "SMOTE boosting percent")
        ->capture_default_str();
    ana->add_option("--minority-sigma", af.minority_sigma, "minority definition cut")
        ->capture_default_str();
    ana->add_option("--save-model", af.save_model, "write the trained nn model to this path");
    ana->add_flag("--force", af.force, "allow very large subset scans");
    ana->add_flag("--allow-missing", af.allow_missing, "drop incomplete nodes with a warning");

    // evaluate
    auto* eva = app.add_subcommand("evaluate", "score reports against ground truth");
    std::vector<std::string> eva_reports;
    std::string eva_truth;
    eva->add_option("--report", eva_reports, "report JSON (repeatable)")->required();
    eva->add_option("--truth", eva_truth, "ground-truth node list")->required();

    // schedule
    auto* sch = app.add_subcommand("schedule", "emit scheduler weights and a mitigation plan");
    std::string sch_input, sch_by = "HPL Mean", sch_model;
    std::vector<std::string> sch_reports;
    bool sch_allow_missing = false;
    sch->add_option("--input", sch_input, "samples CSV")->required();
    sch->add_option("--by", sch_by, "feature name or nn-prediction")->capture_default_str();
    sch->add_option("--model", sch_model, "nn model for --by nn-prediction");
    sch->add_option("--report", sch_reports, "outlier reports feeding the mitigation plan");
    sch->add_flag("--allow-missing", sch_allow_missing, "drop incomplete nodes with a warning");

    // report
    auto* rep = app.add_subcommand("report", "human-readable fleet summary");
    std::string rep_input;
    std::vector<std::string> rep_reports;
    bool rep_allow_missing = false;
    rep->add_option("--input", rep_input, "samples CSV")->required();
    rep->add_option("--report", rep_reports, "report JSON files to summarize");
    rep->add_flag("--allow-missing", rep_allow_missing, "drop incomplete nodes with a warning");

    CLI11_PARSE(app, argc, argv);

    try {
        set_thread_count(g.threads);
        if (sim->parsed()) {
            return cmd_simulate(g, sim_config, sim_nodes, sim_outliers, sim_samples, sim_seed,
                                sim_nodes_opt->count() > 0, sim_outliers_opt->count() > 0,
                                sim_samples_opt->count() > 0, sim_seed_opt->count() > 0);
        }
        if (ing->parsed()) return cmd_ingest(g, ing_input, ing_allow_missing, ing_allow_unknown);
        if (ana->parsed()) return cmd_analyze(g, af);
        if (eva->parsed()) return cmd_evaluate(g, eva_reports, eva_truth);
        if (sch->parsed()) {
            return cmd_schedule(g, sch_input, sch_by, sch_model, sch_reports, sch_allow_missing);
        }
        if (rep->parsed()) return cmd_report(g, rep_input, rep_reports, rep_allow_missing);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
