// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "semseg/errors.hpp"
#include "semseg/pruning.hpp"
#include "semseg/rng.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace semseg;
using test_util::make_frame;

namespace {

std::vector<std::vector<double>> matrix3(double ab, double ac, double bc) {
    return {{1.0, ab, ac}, {ab, 1.0, bc}, {ac, bc, 1.0}};
}

std::vector<std::vector<double>> random_corr_matrix(Rng& rng, std::size_t n) {
    std::vector<std::vector<double>> rho(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = rng.uniform01() * 2.0 - 1.0;
            rho[i][j] = rho[j][i] = v;
        }
    return rho;
}

std::vector<std::string> feature_names(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("f" + std::to_string(i));
    return names;
}

} // namespace

TEST_CASE("spanning tree over two features is the single edge") {
    const auto edges = corr_distance_mst({"a", "b"}, {{1.0, 0.4}, {0.4, 1.0}});
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].a == "a");
    CHECK(edges[0].b == "b");
    CHECK(edges[0].weight == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(edges[0].rho == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(corr_distance_mst({"solo"}, {{1.0}}).empty());
    CHECK(corr_distance_mst({}, {}).empty());
}

TEST_CASE("spanning tree keeps the two strongest of three correlations") {
    const auto edges = corr_distance_mst({"a", "b", "c"}, matrix3(0.9, 0.5, 0.8));
    REQUIRE(edges.size() == 2);
    CHECK(edges[0].a == "a");
    CHECK(edges[0].b == "b");
    CHECK(edges[0].weight == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(edges[1].a == "b");
    CHECK(edges[1].b == "c");
    CHECK(edges[1].weight == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("equal-weight candidates resolve to the lexicographically smaller pair") {
    // Every pair has the same weight, so the tree is the first three
    // pairs in lexicographic order.
    const std::vector<std::string> names = {"a", "b", "c", "d"};
    std::vector<std::vector<double>> rho(4, std::vector<double>(4, 0.5));
    for (std::size_t i = 0; i < 4; ++i) rho[i][i] = 1.0;
    const auto edges = corr_distance_mst(names, rho);
    REQUIRE(edges.size() == 3);
    CHECK(edges[0].a == "a");
    CHECK(edges[0].b == "b");
    CHECK(edges[1].a == "a");
    CHECK(edges[1].b == "c");
    CHECK(edges[2].a == "a");
    CHECK(edges[2].b == "d");
}

TEST_CASE("negative correlations count by magnitude in distances") {
    const auto edges = corr_distance_mst({"a", "b", "c"}, matrix3(-0.9, 0.5, 0.1));
    REQUIRE(edges.size() == 2);
    CHECK(edges[0].a == "a");
    CHECK(edges[0].b == "b");
    CHECK(edges[0].weight == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(edges[0].rho == doctest::Approx(-0.9).epsilon(1e-15));
}

TEST_CASE("spanning tree matches brute-force enumeration on small inputs") {
    Rng rng(99);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 4));
        const auto rho = random_corr_matrix(rng, n);
        const auto names = feature_names(n);
        const auto edges = corr_distance_mst(names, rho);
        REQUIRE(edges.size() == n - 1);

        std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) dist[i][j] = 1.0 - std::abs(rho[i][j]);
        const auto oracle = oracles::brute_force_mst(dist);

        double total = 0.0;
        for (const auto& e : edges) {
            total += e.weight;
            CHECK(e.a < e.b);
        }
        CHECK(total == doctest::Approx(oracle.total_weight).epsilon(1e-12));
    }
}

TEST_CASE("duplicate pair drops the lexicographically larger feature") {
    const auto result =
        prune_segment({"a", "b"}, {{1.0, 1.0}, {1.0, 1.0}}, 0.95, {});
    CHECK(result.retained == std::vector<std::string>{"a"});
    REQUIRE(result.removed.size() == 1);
    CHECK(result.removed[0].feature == "b");
    CHECK(result.removed[0].reason == "redundant");
    CHECK(result.removed[0].partner == "a");
    CHECK(result.removed[0].rho == doctest::Approx(1.0));
}

TEST_CASE("the endpoint with more total correlation is removed") {
    // b carries more total |rho| (0.99 + 0.4) than a (0.99 + 0.3).
    const auto rho = matrix3(0.99, 0.3, 0.4);
    const auto result = prune_segment({"a", "b", "c"}, rho, 0.95, {});
    CHECK(result.retained == std::vector<std::string>{"a", "c"});
    REQUIRE(result.removed.size() == 1);
    CHECK(result.removed[0].feature == "b");
    CHECK(result.removed[0].partner == "a");
}

TEST_CASE("keep-list overrides the redundancy rule") {
    const auto rho = matrix3(0.99, 0.3, 0.4);
    const auto kept_b = prune_segment({"a", "b", "c"}, rho, 0.95, {"b"});
    CHECK(kept_b.retained == std::vector<std::string>{"b", "c"});
    REQUIRE(kept_b.removed.size() == 1);
    CHECK(kept_b.removed[0].feature == "a");

    // Both endpoints protected: nothing can be removed.
    const auto kept_both = prune_segment({"a", "b", "c"}, rho, 0.95, {"a", "b"});
    CHECK(kept_both.retained == std::vector<std::string>{"a", "b", "c"});
    CHECK(kept_both.removed.empty());
}

TEST_CASE("redundancy ties remove the lexicographically larger name") {
    const auto rho = matrix3(0.99, 0.3, 0.3);
    const auto result = prune_segment({"a", "b", "c"}, rho, 0.95, {});
    CHECK(result.retained == std::vector<std::string>{"a", "c"});
    CHECK(result.removed[0].feature == "b");
}

TEST_CASE("strong anti-correlation is redundant too") {
    const auto rho = matrix3(-0.99, 0.1, 0.1);
    const auto result = prune_segment({"a", "b", "c"}, rho, 0.95, {});
    REQUIRE(result.removed.size() == 1);
    CHECK(result.removed[0].rho == doctest::Approx(-0.99));
}

TEST_CASE("at least one feature always survives") {
    const std::size_t n = 4;
    std::vector<std::vector<double>> rho(n, std::vector<double>(n, 1.0));
    const auto result = prune_segment(feature_names(n), rho, 0.95, {});
    CHECK(result.retained.size() == 1);
    CHECK(result.removed.size() == n - 1);
}

TEST_CASE("threshold bounds are enforced") {
    CHECK_THROWS_AS(prune_segment({"a"}, {{1.0}}, 0.0, {}), ConfigError);
    CHECK_THROWS_AS(prune_segment({"a"}, {{1.0}}, 1.5, {}), ConfigError);
}

TEST_CASE("pruning its own output removes nothing more") {
    Rng rng(55);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 5));
        auto rho = random_corr_matrix(rng, n);
        // Push some pairs into redundancy range.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng.uniform01() < 0.4) rho[i][j] = rho[j][i] = 0.97;
        const auto names = feature_names(n);
        const auto first = prune_segment(names, rho, 0.95, {});

        std::vector<std::size_t> kept_idx;
        for (const auto& name : first.retained)
            kept_idx.push_back(static_cast<std::size_t>(
                std::find(names.begin(), names.end(), name) - names.begin()));
        std::vector<std::vector<double>> sub(kept_idx.size(),
                                             std::vector<double>(kept_idx.size()));
        for (std::size_t a = 0; a < kept_idx.size(); ++a)
            for (std::size_t b = 0; b < kept_idx.size(); ++b)
                sub[a][b] = rho[kept_idx[a]][kept_idx[b]];
        const auto second = prune_segment(first.retained, sub, 0.95, {});
        CHECK(second.removed.empty());
        CHECK(second.retained == first.retained);
    }
}

TEST_CASE("raising the threshold never removes more features") {
    Rng rng(56);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 3 + static_cast<std::size_t>(rng.uniform_int(0, 4));
        auto rho = random_corr_matrix(rng, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng.uniform01() < 0.5)
                    rho[i][j] = rho[j][i] = 0.9 + 0.1 * rng.uniform01();
        const auto names = feature_names(n);
        const auto loose = prune_segment(names, rho, 0.90, {});
        const auto strict = prune_segment(names, rho, 0.99, {});
        CHECK(strict.retained.size() >= loose.retained.size());
        // Everything the strict pass removes, the loose pass removes too.
        std::set<std::string> loose_removed;
        for (const auto& r : loose.removed) loose_removed.insert(r.feature);
        for (const auto& r : strict.removed) CHECK(loose_removed.count(r.feature) == 1);
    }
}

namespace {

/// Two segments: G has a planted duplicate (b = 2a), H is noise.
MetricFrame pruning_frame() {
    Rng rng(314);
    const std::size_t T = 200;
    std::vector<double> a(T), c(T), x(T), y(T);
    auto sa = rng.fork(1);
    auto sc = rng.fork(2);
    auto sx = rng.fork(3);
    auto sy = rng.fork(4);
    for (std::size_t t = 0; t < T; ++t) {
        a[t] = sa.normal();
        c[t] = sc.normal();
        x[t] = sx.normal();
        y[t] = sy.normal();
    }
    std::vector<double> b(T);
    for (std::size_t t = 0; t < T; ++t) b[t] = 2.0 * a[t];
    return make_frame({{"a", a}, {"b", b}, {"c", c}, {"x", x}, {"y", y}});
}

} // namespace

TEST_CASE("segment correlation matrix is symmetric with unit diagonal") {
    const auto frame = pruning_frame();
    const auto rho = segment_corr_matrix(frame, {"a", "b", "c"});
    CHECK(rho[0][0] == 1.0);
    CHECK(rho[1][1] == 1.0);
    CHECK(rho[0][1] == doctest::Approx(1.0).epsilon(1e-12)); // b = 2a
    CHECK(rho[0][2] == rho[2][0]);

    // Constant columns yield zero correlation instead of an error.
    const auto flat = make_frame({{"k", {3.0, 3.0, 3.0, 3.0}},
                                  {"m", {1.0, 2.0, 3.0, 4.0}}});
    const auto rho2 = segment_corr_matrix(flat, {"k", "m"});
    CHECK(rho2[0][1] == 0.0);
}

TEST_CASE("end-to-end pruning removes the planted duplicate only") {
    const auto frame = pruning_frame();
    const SegmentMap segments = {{"G", {"a", "b", "c"}}, {"H", {"x", "y"}}};
    const auto result = run_pruning(frame, segments, 0.95);

    REQUIRE(result.retained.size() == 2);
    CHECK(result.retained[0].first == "G");
    CHECK(result.retained[0].second == std::vector<std::string>{"a", "c"});
    CHECK(result.retained[1].second == std::vector<std::string>{"x", "y"});
    REQUIRE(result.removed.at("G").size() == 1);
    CHECK(result.removed.at("G")[0].feature == "b");
    CHECK(result.removed.at("H").empty());

    // Restriction: retained plus removed reassembles each segment.
    for (const auto& [name, features] : segments) {
        std::multiset<std::string> rebuilt;
        for (const auto& [rname, rfeat] : result.retained)
            if (rname == name) rebuilt.insert(rfeat.begin(), rfeat.end());
        for (const auto& r : result.removed.at(name)) rebuilt.insert(r.feature);
        CHECK(rebuilt == std::multiset<std::string>(features.begin(), features.end()));
    }

    CHECK(result.mst_edges.at("G").size() == 2);
    CHECK(result.mst_edges.at("H").size() == 1);
    CHECK(result.tau_red == 0.95);
    CHECK(result.icc_micro_delta ==
          doctest::Approx(std::abs(result.post_report.icc_micro -
                                   result.pre_report.icc_micro))
              .epsilon(1e-15));
}

TEST_CASE("pruning below threshold is the identity") {
    const auto frame = pruning_frame();
    // Only independent-noise features: nothing correlates near 1.
    const SegmentMap segments = {{"G", {"a", "c"}}, {"H", {"x", "y"}}};
    const auto result = run_pruning(frame, segments, 0.95);
    for (const auto& [name, removed] : result.removed) CHECK(removed.empty());
    CHECK(result.post_report.icc_micro ==
          doctest::Approx(result.pre_report.icc_micro).epsilon(1e-15));
    CHECK(*result.post_report.icor_micro ==
          doctest::Approx(*result.pre_report.icor_micro).epsilon(1e-15));
    CHECK(result.post_report.omega_in.size() == result.pre_report.omega_in.size());
    CHECK(result.icc_micro_delta == doctest::Approx(0.0));
}

TEST_CASE("threshold one still removes exact duplicates") {
    const auto frame = pruning_frame();
    const SegmentMap with_dup = {{"G", {"a", "b", "c"}}, {"H", {"x", "y"}}};
    const auto result = run_pruning(frame, with_dup, 1.0);
    REQUIRE(result.removed.at("G").size() == 1);
    CHECK(result.removed.at("G")[0].feature == "b");
    CHECK(result.removed.at("H").empty());
}
