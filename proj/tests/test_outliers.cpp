// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "triage/covariance.hpp"
#include "triage/detect.hpp"
#include "triage/error.hpp"
#include "triage/reference.hpp"
#include "triage/regression.hpp"
#include "triage/rng.hpp"
#include "triage/simulate.hpp"
#include "test_util.hpp"

using namespace triage;
using triage::test::make_matrix;
using triage::test::rel_err;

namespace {

const std::vector<FeatureId> kCompositeFeatures = {
    {"MPI_DGEMM_A", Stat::Min}, {"MPI_DGEMM_A", Stat::Mean}, {"MPI_NBODY_FMA", Stat::Mean}};

// n x d matrix of correlated gaussians for oracle comparisons
FeatureMatrix random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::vector<std::string> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = "n" + std::to_string(1000 + i);
    std::vector<FeatureId> features(d);
    const auto& apps = catalog::apps();
    for (std::size_t j = 0; j < d; ++j) features[j] = {apps[j % apps.size()].token, kStats[j % 4]};

    RandomStream stream(seed);
    std::vector<double> mixing(d * d);
    for (auto& m : mixing) m = stream.gaussian(0.0, 1.0);
    for (std::size_t j = 0; j < d; ++j) mixing[j * d + j] += 3.0;  // keep it well-conditioned

    std::vector<double> values(n * d);
    std::vector<double> raw(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& r : raw) r = stream.gaussian(0.0, 1.0);
        for (std::size_t j = 0; j < d; ++j) {
            double s = 10.0 * static_cast<double>(j + 1);
            for (std::size_t k = 0; k < d; ++k) s += mixing[j * d + k] * raw[k];
            values[i * d + j] = s;
        }
    }
    return make_matrix(nodes, features, values);
}

std::vector<std::size_t> all_features(const FeatureMatrix& m) {
    std::vector<std::size_t> idx(m.feature_count());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
}

}  // namespace

TEST_SUITE("outlier-engine") {

TEST_CASE("composite screen flags the forced-arithmetic node") {
    const auto m = make_matrix({"bad", "good"}, kCompositeFeatures,
                               {1000.0, 1100.0, 900.0,     // 4000 + 2200 + 900 = 7100
                                1100.0, 1150.0, 1200.0});  // 4400 + 2300 + 1200 = 7900
    const auto report =
        composite_screen(m, default_composite_weights(), kDefaultCompositeCutoff);
    REQUIRE(report.flagged.size() == 1);
    CHECK(report.flagged[0].node_id == "bad");
    CHECK(report.flagged[0].score == 7100.0);
    CHECK(report.flagged[0].direction == Direction::Below);
}

TEST_CASE("composite cutoff is a strict inequality") {
    const auto m = make_matrix({"edge", "high"}, kCompositeFeatures,
                               {1000.0, 1095.0, 1000.0,  // exactly 7190
                                1100.0, 1150.0, 1200.0});
    const auto report =
        composite_screen(m, default_composite_weights(), kDefaultCompositeCutoff);
    CHECK(report.flagged.empty());
}

TEST_CASE("composite flagged set is monotone in the cutoff") {
    const auto m = random_dataset(80, 3, 17);
    std::vector<std::pair<std::string, double>> weights = {
        {feature_name(m.features()[0]), 4.0},
        {feature_name(m.features()[1]), 2.0},
        {feature_name(m.features()[2]), 1.0}};
    std::set<std::string> prev;
    for (double cutoff : {20.0, 40.0, 60.0, 80.0, 100.0}) {
        const auto report = composite_screen(m, weights, cutoff);
        std::set<std::string> current;
        for (const auto& f : report.flagged) current.insert(f.node_id);
        CHECK(std::includes(current.begin(), current.end(), prev.begin(), prev.end()));
        prev = current;
    }
}

TEST_CASE("composite fast screen lists fast nodes as informational direction") {
    const auto m = make_matrix({"fast", "mid"}, kCompositeFeatures,
                               {1200.0, 1250.0, 1300.0,  // 4800 + 2500 + 1300 = 8600
                                1050.0, 1100.0, 1100.0});
    const auto report =
        composite_fast_screen(m, default_composite_weights(), kDefaultCompositeFastCutoff);
    REQUIRE(report.flagged.size() == 1);
    CHECK(report.flagged[0].node_id == "fast");
    CHECK(report.flagged[0].direction == Direction::Above);
}

TEST_CASE("fit_covariance handles identical columns via the pseudo-inverse") {
    std::vector<double> values;
    RandomStream stream(5);
    std::vector<std::string> nodes;
    for (int i = 0; i < 40; ++i) {
        const double v = stream.gaussian(10.0, 2.0);
        values.push_back(v);
        values.push_back(v);
        nodes.push_back("n" + std::to_string(i));
    }
    const auto m = make_matrix(nodes, {{"HPL", Stat::Mean}, {"HPL", Stat::Max}}, values);
    const auto model = fit_covariance(m, {0, 1});
    CHECK(model.effective_rank == 1);
}

TEST_CASE("fit_covariance single-feature hand oracle") {
    const auto m = make_matrix({"a", "b", "c"}, {{"HPL", Stat::Mean}}, {2.0, 4.0, 6.0});
    const auto model = fit_covariance(m, {0});
    CHECK(model.mean[0] == 4.0);
    CHECK(model.covariance[0] == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("fit_covariance sampling oracle approaches identity") {
    const std::size_t n = 100000, d = 3;
    std::vector<std::string> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = "n" + std::to_string(i);
    std::vector<double> values(n * d);
    RandomStream stream(101);
    for (auto& v : values) v = stream.gaussian(0.0, 1.0);
    const auto m = make_matrix(
        nodes, {{"HPL", Stat::Min}, {"HPL", Stat::Mean}, {"HPL", Stat::Max}}, values);
    const auto model = fit_covariance(m, {0, 1, 2});
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
            CHECK(std::abs(model.covariance[j * d + k] - (j == k ? 1.0 : 0.0)) < 0.02);
        }
    }
    CHECK(model.effective_rank == 3);
}

TEST_CASE("mahalanobis distance basics") {
    CovarianceModel model;
    model.feature_indices = {0, 1};
    model.feature_names = {"x", "y"};
    model.mean = {1.0, 2.0};
    model.covariance = {1.0, 0.0, 0.0, 1.0};
    model.pseudo_inverse = {1.0, 0.0, 0.0, 1.0};
    model.effective_rank = 2;

    const std::vector<double> at_mean = {1.0, 2.0};
    CHECK(mahalanobis_distance(at_mean, model) == 0.0);

    const std::vector<double> offset = {4.0, 6.0};  // x - M = (3, 4)
    CHECK(mahalanobis_distance(offset, model) == 5.0);

    const std::vector<double> wrong_dim = {1.0};
    CHECK_THROWS_AS(mahalanobis_distance(wrong_dim, model), Error);
}

TEST_CASE("mahalanobis matches the explicit-inverse oracle") {
    const auto m = random_dataset(200, 5, 31);
    const auto features = all_features(m);
    const auto model = fit_covariance(m, features);
    const auto fast = mahalanobis_all(m, model);
    const auto brute = ref::mahalanobis_brute(m, features);
    REQUIRE(fast.size() == brute.size());
    for (std::size_t i = 0; i < fast.size(); ++i) CHECK(rel_err(fast[i], brute[i]) < 1e-9);
}

TEST_CASE("mean squared mahalanobis distance equals the effective rank") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto m = random_dataset(150, 4, seed);
        const auto model = fit_covariance(m, all_features(m));
        const auto d = mahalanobis_all(m, model);
        double ms = 0.0;
        for (double v : d) ms += v * v;
        ms /= static_cast<double>(d.size());
        CHECK(rel_err(ms, static_cast<double>(model.effective_rank)) < 1e-6);
    }
}

TEST_CASE("mahalanobis distances are affine invariant") {
    const std::size_t d = 3;
    const auto m = random_dataset(120, d, 77);
    const auto model = fit_covariance(m, all_features(m));
    const auto before = mahalanobis_all(m, model);

    RandomStream stream(78);
    std::vector<double> a(d * d);
    for (auto& v : a) v = stream.gaussian(0.0, 0.3);
    for (std::size_t j = 0; j < d; ++j) a[j * d + j] += 2.0;
    std::vector<double> shift = {stream.gaussian(0, 5), stream.gaussian(0, 5),
                                 stream.gaussian(0, 5)};

    std::vector<double> transformed(m.node_count() * d);
    for (std::size_t i = 0; i < m.node_count(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double s = shift[j];
            for (std::size_t k = 0; k < d; ++k) s += a[j * d + k] * m.at(i, k);
            transformed[i * d + j] = s;
        }
    }
    const auto mt = make_matrix(m.nodes(), m.features(), transformed);
    const auto model_t = fit_covariance(mt, all_features(mt));
    const auto after = mahalanobis_all(mt, model_t);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(rel_err(before[i], after[i]) < 1e-8);
}

TEST_CASE("subset scan enumerates C(4,2) pairs") {
    const auto m = random_dataset(30, 4, 9);
    SubsetScanOptions options;
    options.max_arity = 2;
    options.primary_feature = feature_name(m.features()[0]);
    const auto scan = subset_outliers(m, options);
    CHECK(scan.size() == 6);
}

TEST_CASE("subset scan covers arities 2..3") {
    const auto m = random_dataset(30, 4, 10);
    SubsetScanOptions options;
    options.max_arity = 3;
    options.primary_feature = feature_name(m.features()[0]);
    const auto scan = subset_outliers(m, options);
    CHECK(scan.size() == 6 + 4);
    CHECK_THROWS_AS(
        [&] {
            SubsetScanOptions bad = options;
            bad.max_arity = 7;
            return subset_outliers(m, bad);
        }(),
        Error);
}

TEST_CASE("rank-deficient subsets are reported with metadata") {
    std::vector<std::string> nodes;
    std::vector<double> values;
    RandomStream stream(6);
    for (int i = 0; i < 50; ++i) {
        nodes.push_back("n" + std::to_string(100 + i));
        const double v = stream.gaussian(100.0, 5.0);
        values.push_back(v);
        values.push_back(2.0 * v);  // exactly collinear
    }
    const auto m = make_matrix(nodes, {{"HPL", Stat::Mean}, {"MPI_DGEMM_A", Stat::Mean}}, values);
    const auto report = mahalanobis_outliers(m, {0, 1}, 3.5, "HPL Mean");
    CHECK(report.metadata.count("rank_deficient") == 1);
}

TEST_CASE("mahalanobis pair finds injected slow nodes on a synthetic fleet") {
    FleetConfig config;
    config.node_count = 600;
    config.outlier_count = 6;
    config.samples_per_node = 30;
    config.seed = 12;
    const auto fleet = simulate_fleet(config);
    const auto m = aggregate(fleet.samples);
    const std::vector<std::size_t> pair = {m.require_feature("HPL Mean"),
                                           m.require_feature("MPI DGEMM Mean")};
    const auto report = mahalanobis_outliers(m, pair, 3.5, "HPL Mean");

    std::size_t hits = 0;
    for (const auto& f : report.flagged) {
        if (fleet.truth.contains(f.node_id)) ++hits;
    }
    CHECK(hits >= 5);  // at this contamination level one miss is tolerable
    CHECK(report.flagged.size() <= 10);
}

TEST_CASE("sigma outliers flag the constructed low node at 3.5 sigma") {
    std::vector<std::string> nodes;
    std::vector<double> values;
    RandomStream stream(3);
    for (int i = 0; i < 200; ++i) {
        nodes.push_back("n" + std::to_string(100 + i));
        values.push_back(stream.gaussian(0.0, 1.0));
    }
    nodes.push_back("low");
    values.push_back(-4.0);
    const auto m = make_matrix(nodes, {{"HPL", Stat::Mean}}, values);

    const auto report = sigma_outliers(m, "HPL Mean", 3.5, SigmaSide::Below);
    REQUIRE(report.flagged.size() >= 1);
    bool found = false;
    for (const auto& f : report.flagged) {
        if (f.node_id == "low") found = true;
        CHECK(f.direction == Direction::Below);
    }
    CHECK(found);
}

TEST_CASE("sigma outliers keep fast nodes on the requested side only") {
    std::vector<std::string> nodes;
    std::vector<double> values;
    RandomStream stream(8);
    for (int i = 0; i < 200; ++i) {
        nodes.push_back("n" + std::to_string(100 + i));
        values.push_back(stream.gaussian(0.0, 1.0));
    }
    nodes.push_back("fast");
    values.push_back(5.0);
    const auto m = make_matrix(nodes, {{"HPL", Stat::Mean}}, values);

    const auto above = sigma_outliers(m, "HPL Mean", 3.5, SigmaSide::Above);
    REQUIRE(above.flagged.size() == 1);
    CHECK(above.flagged[0].node_id == "fast");
    CHECK(above.flagged[0].direction == Direction::Above);

    const auto below = sigma_outliers(m, "HPL Mean", 3.5, SigmaSide::Below);
    for (const auto& f : below.flagged) CHECK(f.node_id != "fast");
}

TEST_CASE("sigma outliers at k=0 flag everything but exact-mean nodes") {
    const auto m = make_matrix({"a", "b", "c"}, {{"HPL", Stat::Mean}}, {1.0, 2.0, 3.0});
    const auto report = sigma_outliers(m, "HPL Mean", 0.0, SigmaSide::Both);
    REQUIRE(report.flagged.size() == 2);
    CHECK(report.flagged[0].node_id == "a");
    CHECK(report.flagged[0].direction == Direction::Below);
    CHECK(report.flagged[1].node_id == "c");
    CHECK(report.flagged[1].direction == Direction::Above);
}

TEST_CASE("sigma outliers reject a constant column") {
    const auto m = make_matrix({"a", "b"}, {{"HPL", Stat::Mean}}, {1.0, 1.0});
    CHECK_THROWS_WITH_AS(sigma_outliers(m, "HPL Mean", 3.5, SigmaSide::Below),
                         doctest::Contains("constant"), Error);
}

TEST_CASE("report JSON round-trip") {
    const auto m = make_matrix({"a", "b", "c"}, {{"HPL", Stat::Mean}}, {1.0, 2.0, 30.0});
    auto report = sigma_outliers(m, "HPL Mean", 0.5, SigmaSide::Both);
    report.metadata["note"] = "fixture";
    const auto parsed = report_from_json(report_to_json(report));
    CHECK(parsed.method == report.method);
    CHECK(parsed.subset == report.subset);
    CHECK(parsed.threshold == report.threshold);
    CHECK(parsed.universe == report.universe);
    REQUIRE(parsed.flagged.size() == report.flagged.size());
    for (std::size_t i = 0; i < parsed.flagged.size(); ++i) {
        CHECK(parsed.flagged[i].node_id == report.flagged[i].node_id);
        CHECK(parsed.flagged[i].score == report.flagged[i].score);  // exact double round-trip
        CHECK(parsed.flagged[i].direction == report.flagged[i].direction);
    }
    CHECK(parsed.metadata.at("note") == "fixture");
}

TEST_CASE("regression recovers an exact linear relation") {
    std::vector<std::string> nodes;
    std::vector<double> values;
    RandomStream stream(21);
    for (int i = 0; i < 50; ++i) {
        nodes.push_back("n" + std::to_string(100 + i));
        const double x = stream.gaussian(10.0, 3.0);
        values.push_back(2.0 * x);  // y first
        values.push_back(x);
    }
    const auto m = make_matrix(nodes, {{"HPL", Stat::Mean}, {"MPI_DGEMM_A", Stat::Mean}}, values);
    const auto fit = fit_regression(m, 0, {1});
    REQUIRE(fit.selected.size() == 1);
    CHECK(fit.coefficients[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(fit.intercept) < 1e-7);
    CHECK(fit.residual_stddev < 1e-9);

    // training residuals have zero mean
    double mean_residual = 0.0;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
        mean_residual += m.at(i, 0) - predict(fit, m, i);
    }
    CHECK(std::abs(mean_residual / static_cast<double>(m.node_count())) < 1e-9);
}

TEST_CASE("backward elimination drops an uninformative feature") {
    std::vector<std::string> nodes;
    std::vector<double> values;
    RandomStream stream(22);
    const std::size_t n = 120;
    for (std::size_t i = 0; i < n; ++i) {
        nodes.push_back("n" + std::to_string(100 + i));
        const double a = stream.gaussian(5.0, 2.0);
        const double b = stream.gaussian(0.0, 2.0);
        values.push_back(3.0 * a + stream.gaussian(0.0, 0.01));  // y
        values.push_back(a);
        values.push_back(b);
    }
    const auto m = make_matrix(
        nodes, {{"HPL", Stat::Mean}, {"MPI_DGEMM_A", Stat::Mean}, {"MPI_NBODY_FMA", Stat::Mean}},
        values);
    const auto fit = fit_regression(m, 0, {1, 2});
    REQUIRE(fit.selected == std::vector<std::size_t>{1});
    // 3*SE bound with sigma=0.01, n=120, sd_a=2: SE ~ 0.01/(2*sqrt(120))
    CHECK(std::abs(fit.coefficients[0] - 3.0) < 3.0 * 0.01 / (2.0 * std::sqrt(120.0)) + 1e-6);
}

TEST_CASE("collinear candidates resolve to a minimum-norm solution") {
    std::vector<std::string> nodes;
    std::vector<double> values;
    RandomStream stream(23);
    for (int i = 0; i < 60; ++i) {
        nodes.push_back("n" + std::to_string(100 + i));
        const double a = stream.gaussian(4.0, 1.5);
        values.push_back(2.0 * a);
        values.push_back(a);
        values.push_back(a);
    }
    const auto m = make_matrix(
        nodes, {{"HPL", Stat::Mean}, {"MPI_DGEMM_A", Stat::Mean}, {"MPI_DGEMM_B", Stat::Mean}},
        values);
    const auto fit = fit_regression(m, 0, {1, 2});
    // elimination may drop one duplicate; whatever survives must predict exactly
    double worst = 0.0;
    for (std::size_t i = 0; i < m.node_count(); ++i) {
        worst = std::max(worst, std::abs(m.at(i, 0) - predict(fit, m, i)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("fit_regression validates inputs") {
    const auto m = random_dataset(20, 3, 4);
    CHECK_THROWS_AS(fit_regression(m, 0, {}), Error);
    CHECK_THROWS_AS(fit_regression(m, 0, {0}), Error);
}

}  // TEST_SUITE
