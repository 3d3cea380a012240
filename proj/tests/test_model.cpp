// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <set>

#include "triage/error.hpp"
#include "triage/io_util.hpp"
#include "triage/samples.hpp"
#include "triage/stats.hpp"
#include "test_util.hpp"

using namespace triage;

namespace {

std::string two_node_csv() {
    return "node_id,app_id,sample_index,value\n"
           "n1,HPL,0,10.0\n"
           "n1,HPL,1,12.0\n"
           "n2,HPL,0,11.0\n"
           "n2,HPL,1,9.5\n";
}

}  // namespace

TEST_SUITE("fleet-model") {

TEST_CASE("ingest parses a well-formed file") {
    const SampleSet set = ingest_samples(two_node_csv());
    CHECK(set.node_count() == 2);
    CHECK(set.app_count() == 1);
    CHECK(set.record_count() == 4);
    CHECK(set.samples(0, 0) == std::vector<double>{10.0, 12.0});
}

TEST_CASE("ingest result is independent of row order") {
    const std::string shuffled =
        "node_id,app_id,sample_index,value\n"
        "n2,HPL,1,9.5\n"
        "n1,HPL,1,12.0\n"
        "n2,HPL,0,11.0\n"
        "n1,HPL,0,10.0\n";
    CHECK(export_samples_csv(ingest_samples(two_node_csv())) ==
          export_samples_csv(ingest_samples(shuffled)));
}

TEST_CASE("ingest rejects a duplicated triple") {
    const std::string csv =
        "node_id,app_id,sample_index,value\n"
        "n1,HPL,0,10.0\n"
        "n1,HPL,0,11.0\n";
    CHECK_THROWS_WITH_AS(ingest_samples(csv),
                         doctest::Contains("duplicate triple (n1, HPL, 0)"), Error);
}

TEST_CASE("ingest rejects non-positive values with the line number") {
    const std::string csv =
        "node_id,app_id,sample_index,value\n"
        "n1,HPL,0,-3.0\n";
    CHECK_THROWS_WITH_AS(ingest_samples(csv), doctest::Contains("line 2: non-positive value"),
                         Error);
}

TEST_CASE("ingest rejects malformed rows") {
    CHECK_THROWS_WITH_AS(ingest_samples("node_id,app_id,sample_index,value\nn1,HPL,0\n"),
                         doctest::Contains("expected 4 columns"), Error);
    CHECK_THROWS_WITH_AS(ingest_samples("node_id,app_id,sample_index,value\nn1,HPL,0,abc\n"),
                         doctest::Contains("non-numeric value"), Error);
    CHECK_THROWS_WITH_AS(ingest_samples("nope\n"), doctest::Contains("expected header"), Error);
}

TEST_CASE("ingest enforces the closed app catalog unless passthrough is set") {
    const std::string csv =
        "node_id,app_id,sample_index,value\n"
        "n1,MYSTERY_APP,0,1.0\n";
    CHECK_THROWS_WITH_AS(ingest_samples(csv), doctest::Contains("unknown app_id"), Error);

    IngestOptions options;
    options.allow_unknown_apps = true;
    const SampleSet set = ingest_samples(csv, options);
    CHECK(set.app_count() == 1);
    CHECK(set.apps()[0] == "MYSTERY_APP");
}

TEST_CASE("ingest enforces rectangular completeness") {
    const std::string csv =
        "node_id,app_id,sample_index,value\n"
        "n1,HPL,0,10.0\n"
        "n1,DEFLATED_HPL,0,5.0\n"
        "n2,HPL,0,11.0\n";
    CHECK_THROWS_WITH_AS(ingest_samples(csv), doctest::Contains("rectangular completeness"),
                         Error);

    IngestOptions options;
    options.allow_missing = true;
    std::vector<std::string> warnings;
    const SampleSet set = ingest_samples(csv, options, &warnings);
    CHECK(set.node_count() == 1);
    CHECK(set.nodes()[0] == "n1");
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("n2") != std::string::npos);
}

TEST_CASE("aggregate two-point statistics") {
    const std::string csv =
        "node_id,app_id,sample_index,value\n"
        "n1,HPL,0,2.0\n"
        "n1,HPL,1,4.0\n";
    const FeatureMatrix m = aggregate(ingest_samples(csv));
    CHECK(m.at(0, m.require_feature("HPL Min")) == 2.0);
    CHECK(m.at(0, m.require_feature("HPL Mean")) == 3.0);
    CHECK(m.at(0, m.require_feature("HPL StdDev")) == 1.0);  // population
    CHECK(m.at(0, m.require_feature("HPL Max")) == 4.0);
}

TEST_CASE("aggregate of a single sample degenerates cleanly") {
    const std::string csv =
        "node_id,app_id,sample_index,value\n"
        "n1,HPL,0,7.25\n";
    const FeatureMatrix m = aggregate(ingest_samples(csv));
    CHECK(m.at(0, 0) == 7.25);  // Min
    CHECK(m.at(0, 1) == 7.25);  // Mean
    CHECK(m.at(0, 2) == 0.0);   // StdDev
    CHECK(m.at(0, 3) == 7.25);  // Max
}

TEST_CASE("aggregate column order is app-major over Min/Mean/StdDev/Max") {
    const std::string csv =
        "node_id,app_id,sample_index,value\n"
        "n1,HPL,0,1.0\n"
        "n1,OMP_DGEMM_FMA,0,2.0\n";
    const FeatureMatrix m = aggregate(ingest_samples(csv));
    REQUIRE(m.feature_count() == 8);
    // OMP_DGEMM_FMA precedes HPL in the catalog
    CHECK(feature_name(m.features()[0]) == "OMP DGEMM Min");
    CHECK(feature_name(m.features()[3]) == "OMP DGEMM Max");
    CHECK(feature_name(m.features()[4]) == "HPL Min");
}

TEST_CASE("aggregate invariants on random samples") {
    RandomStream stream(19);
    std::string csv = "node_id,app_id,sample_index,value\n";
    for (int n = 0; n < 12; ++n) {
        for (int s = 0; s < 17; ++s) {
            csv += "node" + std::to_string(n) + ",HPL," + std::to_string(s) + "," +
                   format_double(50.0 + 10.0 * stream.uniform()) + "\n";
        }
    }
    const SampleSet set = ingest_samples(csv);
    const FeatureMatrix m = aggregate(set);
    for (std::size_t i = 0; i < m.node_count(); ++i) {
        const double mn = m.at(i, 0), mean = m.at(i, 1), sd = m.at(i, 2), mx = m.at(i, 3);
        CHECK(mn <= mean);
        CHECK(mean <= mx);
        CHECK(sd >= 0.0);
        // population variance identity
        const auto& v = set.samples(i, 0);
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double var = ss / static_cast<double>(v.size());
        CHECK(triage::test::rel_err(sd * sd, var) < 1e-12);
    }
}

TEST_CASE("boxplot groups partition 92 nodes as 70/11/11") {
    std::string csv = "node_id,app_id,sample_index,value\n";
    RandomStream stream(4);
    for (int n = 0; n < 92; ++n) {
        char id[8];
        std::snprintf(id, sizeof(id), "n%03d", n);
        for (int s = 0; s < 10; ++s) {
            csv += std::string(id) + ",HPL," + std::to_string(s) + "," +
                   format_double(800.0 + stream.gaussian(0.0, 8.0)) + "\n";
        }
    }
    const SampleSet set = ingest_samples(csv);
    const FeatureMatrix m = aggregate(set);
    const auto groups = boxplot_groups(set, m, {"HPL", Stat::Mean}, 70, 11, 11);
    CHECK(groups.bottom.size() == 70);
    CHECK(groups.middle.size() == 11);
    CHECK(groups.top.size() == 11);

    std::set<std::string> all;
    for (const auto* group : {&groups.bottom, &groups.middle, &groups.top}) {
        for (const auto& s : *group) all.insert(s.node_id);
    }
    CHECK(all.size() == 92);  // disjoint and covering

    auto group_mean_max = [&](const std::vector<NodeSummary>& g) {
        double v = -1e300;
        for (const auto& s : g) {
            const auto node = set.node_index(s.node_id);
            v = std::max(v, m.at(*node, m.require_feature("HPL Mean")));
        }
        return v;
    };
    auto group_mean_min = [&](const std::vector<NodeSummary>& g) {
        double v = 1e300;
        for (const auto& s : g) {
            const auto node = set.node_index(s.node_id);
            v = std::min(v, m.at(*node, m.require_feature("HPL Mean")));
        }
        return v;
    };
    CHECK(group_mean_max(groups.bottom) <= group_mean_min(groups.middle));
    CHECK(group_mean_max(groups.middle) <= group_mean_min(groups.top));
}

TEST_CASE("boxplot groups on 3 nodes with 1/1/1 split are the sorted singletons") {
    const std::string csv =
        "node_id,app_id,sample_index,value\n"
        "a,HPL,0,30.0\n"
        "b,HPL,0,10.0\n"
        "c,HPL,0,20.0\n";
    const SampleSet set = ingest_samples(csv);
    const FeatureMatrix m = aggregate(set);
    const auto groups = boxplot_groups(set, m, {"HPL", Stat::Mean}, 1, 1, 1);
    REQUIRE(groups.bottom.size() == 1);
    CHECK(groups.bottom[0].node_id == "b");
    CHECK(groups.middle[0].node_id == "c");
    CHECK(groups.top[0].node_id == "a");
}

TEST_CASE("boxplot groups reject counts exceeding the fleet") {
    const SampleSet set = ingest_samples(two_node_csv());
    const FeatureMatrix m = aggregate(set);
    CHECK_THROWS_WITH_AS(boxplot_groups(set, m, {"HPL", Stat::Mean}, 100, 11, 11),
                         doctest::Contains("exceed"), Error);
}

TEST_CASE("variance growth is zero on constant data") {
    std::string csv = "node_id,app_id,sample_index,value\n";
    for (int s = 0; s < 50; ++s) csv += "n1,HPL," + std::to_string(s) + ",5.0\n";
    const SampleSet set = ingest_samples(csv);
    const auto growth = variance_growth(set, "n1", "HPL", {10, 20, 30, 40, 50});
    REQUIRE(growth.size() == 5);
    for (const auto& [b, v] : growth) CHECK(v == 0.0);
}

TEST_CASE("variance growth hand-computed oracle") {
    const std::string csv =
        "node_id,app_id,sample_index,value\n"
        "n1,HPL,0,1.0\n"
        "n1,HPL,1,1.0\n"
        "n1,HPL,2,1.0\n"
        "n1,HPL,3,9.0\n";
    const SampleSet set = ingest_samples(csv);
    const auto growth = variance_growth(set, "n1", "HPL", {2, 4});
    REQUIRE(growth.size() == 2);
    CHECK(growth[0] == std::pair<std::size_t, double>{2, 0.0});
    CHECK(growth[1].first == 4);
    CHECK(growth[1].second == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("variance growth rejects oversized batches") {
    const SampleSet set = ingest_samples(two_node_csv());
    CHECK_THROWS_WITH_AS(variance_growth(set, "n1", "HPL", {3}),
                         doctest::Contains("exceeds available"), Error);
}

TEST_CASE("sigma score") {
    CHECK(sigma_score(7.0, 10.0, 1.0) == -3.0);
    CHECK(sigma_score(10.0, 10.0, 5.0) == 0.0);
    CHECK(sigma_score(803.0, 830.0, 7.7) == doctest::Approx(-3.5065).epsilon(1e-4));
    CHECK_THROWS_AS(sigma_score(1.0, 1.0, 0.0), Error);
}

}  // TEST_SUITE
