// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "triage/error.hpp"
#include "triage/kmeans.hpp"
#include "triage/mds.hpp"
#include "triage/rng.hpp"
#include "test_util.hpp"

using namespace triage;
using triage::test::make_matrix;
using triage::test::rel_err;

namespace {

FeatureMatrix points_matrix(const std::vector<std::array<double, 2>>& pts) {
    std::vector<std::string> nodes(pts.size());
    std::vector<double> values(pts.size() * 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        nodes[i] = "n" + std::to_string(100 + i);
        values[i * 2] = pts[i][0];
        values[i * 2 + 1] = pts[i][1];
    }
    return make_matrix(nodes, {{"HPL", Stat::Mean}, {"MPI_DGEMM_A", Stat::Mean}}, values);
}

// optimal inertia over every 2-partition, exact centroids per part
double brute_force_two_means(const FeatureMatrix& m) {
    const std::size_t n = m.node_count();
    const std::size_t d = m.feature_count();
    double best = 1e300;
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<double> c0(d, 0.0), c1(d, 0.0);
        std::size_t n0 = 0, n1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = m.row(i);
            if (mask & (1u << i)) {
                ++n0;
                for (std::size_t j = 0; j < d; ++j) c0[j] += row[j];
            } else {
                ++n1;
                for (std::size_t j = 0; j < d; ++j) c1[j] += row[j];
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            c0[j] /= static_cast<double>(n0);
            c1[j] /= static_cast<double>(n1);
        }
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = m.row(i);
            const auto& c = (mask & (1u << i)) ? c0 : c1;
            for (std::size_t j = 0; j < d; ++j) cost += (row[j] - c[j]) * (row[j] - c[j]);
        }
        best = std::min(best, cost);
    }
    return best;
}

// full Procrustes residual (rotation/reflection + translation) of the
// embedding against the source points, relative to the source norm
double procrustes_residual(const std::vector<std::array<double, 2>>& source,
                           const Embedding2D& embedding) {
    const std::size_t n = source.size();
    Eigen::MatrixXd x(n, 2), y(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        x(static_cast<Eigen::Index>(i), 0) = source[i][0];
        x(static_cast<Eigen::Index>(i), 1) = source[i][1];
        y(static_cast<Eigen::Index>(i), 0) = embedding.coords[i][0];
        y(static_cast<Eigen::Index>(i), 1) = embedding.coords[i][1];
    }
    x.rowwise() -= x.colwise().mean();
    y.rowwise() -= y.colwise().mean();
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(y.transpose() * x,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Matrix2d rot = svd.matrixU() * svd.matrixV().transpose();
    return (y * rot - x).norm() / std::max(x.norm(), 1e-30);
}

std::vector<double> pairwise_distances(const std::vector<std::array<double, 2>>& pts) {
    const std::size_t n = pts.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d[i * n + j] = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
        }
    }
    return d;
}

}  // namespace

TEST_SUITE("cluster-embed") {

TEST_CASE("kmeans with k equal to the point count reaches zero inertia") {
    const auto m = points_matrix({{0, 0}, {5, 1}, {2, 8}, {9, 9}});
    const auto result = kmeans(m, 4, 1);
    CHECK(result.inertia == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("kmeans recovers two well-separated blobs") {
    RandomStream stream(42);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 120; ++i) {
        pts.push_back({stream.gaussian(0.0, 0.5), stream.gaussian(0.0, 0.5)});
    }
    for (int i = 0; i < 120; ++i) {
        pts.push_back({stream.gaussian(20.0, 0.5), stream.gaussian(20.0, 0.5)});
    }
    const auto m = points_matrix(pts);
    const auto result = kmeans(m, 2, 7);
    // 3 standard errors of a blob mean: 3 * 0.5 / sqrt(120)
    const double bound = 3.0 * 0.5 / std::sqrt(120.0);
    std::vector<std::vector<double>> c = result.centroids;
    std::sort(c.begin(), c.end());
    CHECK(std::abs(c[0][0] - 0.0) < bound);
    CHECK(std::abs(c[0][1] - 0.0) < bound);
    CHECK(std::abs(c[1][0] - 20.0) < bound);
    CHECK(std::abs(c[1][1] - 20.0) < bound);
}

TEST_CASE("kmeans matches the exhaustive optimum on 8-point instances") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RandomStream stream(seed);
        std::vector<std::array<double, 2>> pts;
        for (int i = 0; i < 8; ++i) {
            pts.push_back({stream.uniform(0.0, 10.0), stream.uniform(0.0, 10.0)});
        }
        const auto m = points_matrix(pts);
        const auto result = kmeans(m, 2, seed);
        const double best = brute_force_two_means(m);
        CHECK(rel_err(result.inertia, best) < 1e-9);
    }
}

TEST_CASE("kmeans inertia history never increases") {
    RandomStream stream(55);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 100; ++i) {
        pts.push_back({stream.uniform(0.0, 50.0), stream.uniform(0.0, 50.0)});
    }
    const auto result = kmeans(points_matrix(pts), 5, 3);
    for (std::size_t i = 1; i < result.inertia_history.size(); ++i) {
        CHECK(result.inertia_history[i] <= result.inertia_history[i - 1] * (1.0 + 1e-12));
    }
    CHECK(result.iterations >= 1);
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
    RandomStream stream(66);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 60; ++i) {
        pts.push_back({stream.uniform(0.0, 5.0), stream.uniform(0.0, 5.0)});
    }
    const auto m = points_matrix(pts);
    const auto a = kmeans(m, 3, 9);
    const auto b = kmeans(m, 3, 9);
    CHECK(a.assignment == b.assignment);
    CHECK(a.inertia == b.inertia);
    CHECK_THROWS_AS(kmeans(m, 61, 9), Error);
}

TEST_CASE("classical mds reproduces collinear points exactly") {
    const std::vector<double> d = {0, 1, 2, 1, 0, 1, 2, 1, 0};
    const auto e = classical_mds(d, 3);
    auto dist = [&](std::size_t i, std::size_t j) {
        return std::hypot(e.coords[i][0] - e.coords[j][0], e.coords[i][1] - e.coords[j][1]);
    };
    CHECK(dist(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dist(1, 2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dist(0, 2) == doctest::Approx(2.0).epsilon(1e-9));
    // rank-1 input embeds on one axis
    for (const auto& c : e.coords) CHECK(std::abs(c[1]) < 1e-9);
}

TEST_CASE("classical mds reconstructs random 2D point sets") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RandomStream stream(seed);
        std::vector<std::array<double, 2>> pts;
        const std::size_t n = 10 + 5 * seed;
        for (std::size_t i = 0; i < n; ++i) {
            pts.push_back({stream.uniform(-10.0, 10.0), stream.uniform(-10.0, 10.0)});
        }
        const auto d = pairwise_distances(pts);
        const auto e = classical_mds(d, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double got = std::hypot(e.coords[i][0] - e.coords[j][0],
                                              e.coords[i][1] - e.coords[j][1]);
                CHECK(rel_err(got, d[i * n + j]) < 1e-6);
            }
        }
        CHECK(procrustes_residual(pts, e) < 1e-6);

        // centred embedding
        double mx = 0.0, my = 0.0;
        for (const auto& c : e.coords) {
            mx += c[0];
            my += c[1];
        }
        CHECK(std::abs(mx / static_cast<double>(n)) < 1e-9);
        CHECK(std::abs(my / static_cast<double>(n)) < 1e-9);
    }
}

TEST_CASE("all-equal distances embed as an equilateral triangle") {
    const std::vector<double> d = {0, 1, 1, 1, 0, 1, 1, 1, 0};
    const auto e = classical_mds(d, 3);
    auto dist = [&](std::size_t i, std::size_t j) {
        return std::hypot(e.coords[i][0] - e.coords[j][0], e.coords[i][1] - e.coords[j][1]);
    };
    CHECK(std::abs(dist(0, 1) - 1.0) < 1e-9);
    CHECK(std::abs(dist(0, 2) - 1.0) < 1e-9);
    CHECK(std::abs(dist(1, 2) - 1.0) < 1e-9);
}

TEST_CASE("classical mds validates its input") {
    CHECK_THROWS_WITH_AS(classical_mds({0, 1, 2, 0}, 2), doctest::Contains("non-symmetric"),
                         Error);
    CHECK_THROWS_WITH_AS(classical_mds({1, 0, 0, 0}, 2), doctest::Contains("diagonal"), Error);
}

TEST_CASE("classical mds sign convention is deterministic") {
    RandomStream stream(33);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 12; ++i) {
        pts.push_back({stream.uniform(-3.0, 3.0), stream.uniform(-3.0, 3.0)});
    }
    const auto d = pairwise_distances(pts);
    const auto a = classical_mds(d, pts.size());
    const auto b = classical_mds(d, pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(a.coords[i][0] == b.coords[i][0]);
        CHECK(a.coords[i][1] == b.coords[i][1]);
    }
    // first non-zero loading of each axis is positive
    for (std::size_t axis = 0; axis < 2; ++axis) {
        for (const auto& c : a.coords) {
            if (std::abs(c[axis]) > 1e-12) {
                CHECK(c[axis] > 0.0);
                break;
            }
        }
    }
}

TEST_CASE("map plot spreads a high-variance cluster wider than a tight one") {
    RandomStream stream(91);
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 60; ++i) {
        pts.push_back({stream.gaussian(0.0, 0.3), stream.gaussian(0.0, 0.3)});
    }
    for (int i = 0; i < 20; ++i) {
        pts.push_back({stream.gaussian(15.0, 4.0), stream.gaussian(15.0, 4.0)});
    }
    const auto m = points_matrix(pts);
    const auto clusters = kmeans(m, 2, 4);
    const auto points = map_plot_data(m, clusters);

    // mean embedded distance from each cluster's centroid
    std::map<int, std::array<double, 3>> acc;  // label -> (sum x, sum y, count)
    for (const auto& p : points) {
        auto& a = acc[p.cluster];
        a[0] += p.x;
        a[1] += p.y;
        a[2] += 1.0;
    }
    std::map<int, double> spread;
    for (const auto& p : points) {
        const auto& a = acc[p.cluster];
        spread[p.cluster] +=
            std::hypot(p.x - a[0] / a[2], p.y - a[1] / a[2]) / a[2];
    }
    REQUIRE(spread.size() == 2);
    std::vector<double> spreads;
    for (const auto& [label, s] : spread) spreads.push_back(s);
    std::sort(spreads.begin(), spreads.end());
    CHECK(spreads[1] > 2.0 * spreads[0]);
}

TEST_CASE("map plot handles degenerate cases") {
    const auto m = points_matrix({{1, 1}, {1, 1}, {4, 5}});
    const auto clusters = kmeans(m, 1, 2);
    const auto points = map_plot_data(m, clusters);
    REQUIRE(points.size() == 3);
    for (const auto& p : points) CHECK(p.cluster == 1);
    // identical nodes land on identical coordinates
    CHECK(points[0].x == doctest::Approx(points[1].x).epsilon(1e-12));
    CHECK(points[0].y == doctest::Approx(points[1].y).epsilon(1e-12));

    const auto csv = map_plot_csv(points);
    CHECK(csv.rfind("node_id,x,y,cluster\n", 0) == 0);
    const auto svg = map_plot_svg(points);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);
}

}  // TEST_SUITE
