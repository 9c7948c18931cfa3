// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "semseg/errors.hpp"
#include "semseg/pruning.hpp"
#include "semseg/separability.hpp"
#include "semseg/stats.hpp"
#include "semseg/synth.hpp"
#include "semseg/transforms.hpp"
#include "support/test_util.hpp"

using namespace semseg;

namespace {

SynthConfig small_config(std::uint64_t seed = 7, std::size_t T = 600) {
    auto config = SynthConfig::defaults();
    config.n_samples = T;
    config.seed = seed;
    return config;
}

} // namespace

TEST_CASE("generation is bit-identical for a fixed seed") {
    const auto a = generate_telemetry(small_config());
    const auto b = generate_telemetry(small_config());
    CHECK(a.frame.timestamps == b.frame.timestamps);
    CHECK(a.frame.columns == b.frame.columns);
    CHECK(a.frame.values == b.frame.values);
    REQUIRE(a.faults.events.size() == b.faults.events.size());
    for (std::size_t i = 0; i < a.faults.events.size(); ++i) {
        CHECK(a.faults.events[i].timestamp == b.faults.events[i].timestamp);
        CHECK(a.faults.events[i].magnitude == b.faults.events[i].magnitude);
    }

    const auto c = generate_telemetry(small_config(8));
    CHECK(a.frame.values != c.frame.values);
}

TEST_CASE("generated frame has the configured shape") {
    const auto result = generate_telemetry(small_config());
    CHECK(result.frame.n_rows() == 600);
    CHECK(result.frame.n_cols() == 6 * 4 + 20);
    CHECK(result.frame.timestamps.front() == 1765497600);
    CHECK(result.frame.timestamps[1] - result.frame.timestamps[0] == 30);
    CHECK(result.taxonomy.canonical_segments.size() == 6);
    CHECK(result.taxonomy.residual_families.size() == 4);

    // The ground-truth taxonomy routes every generated column.
    const auto space = assign_segments(result.frame, result.taxonomy);
    CHECK(space.unmatched.empty());
    CHECK(space.canonical_features().size() == 24);
    CHECK(space.residual_features().size() == 20);
}

TEST_CASE("counter features are non-decreasing cumulative series") {
    const auto result = generate_telemetry(small_config());
    for (const auto& name : {"synth_cumulative_00", "synth_network_03"}) {
        const auto& series = result.frame.col(name);
        for (std::size_t t = 1; t < series.size(); ++t)
            CHECK(series[t] >= series[t - 1]);
    }
    // Latency and ratio emissions stay positive / bounded.
    for (double v : result.frame.col("synth_latency_00")) CHECK(v > 0.0);
    for (double v : result.frame.col("synth_ratio_00")) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("config validation rejects out-of-range settings") {
    auto bad = small_config();
    bad.n_samples = 50;
    CHECK_THROWS_AS(generate_telemetry(bad), ConfigError);

    bad = small_config();
    bad.segments.clear();
    CHECK_THROWS_AS(generate_telemetry(bad), ConfigError);

    bad = small_config();
    bad.segments[0].loading_min = 2.0; // above loading_max
    CHECK_THROWS_AS(generate_telemetry(bad), ConfigError);

    bad = small_config();
    bad.segments[0].noise_std = -1.0;
    CHECK_THROWS_AS(generate_telemetry(bad), ConfigError);

    bad = small_config();
    bad.latent_persistence = 1.0;
    CHECK_THROWS_AS(generate_telemetry(bad), ConfigError);

    bad = small_config();
    bad.fault_latent_index = 6;
    CHECK_THROWS_AS(generate_telemetry(bad), ConfigError);

    bad = small_config();
    bad.planted_duplicates = 7;
    CHECK_THROWS_AS(generate_telemetry(bad), ConfigError);

    bad = small_config();
    bad.segments[0].family = "plasma";
    CHECK_THROWS_AS(generate_telemetry(bad), ConfigError);
}

TEST_CASE("zero observation noise makes segments internally coherent") {
    auto config = small_config();
    for (auto& segment : config.segments) segment.noise_std = 0.0;
    const auto result = generate_telemetry(config);
    const auto space = assign_segments(result.frame, result.taxonomy);
    const auto [canonical, residual] =
        apply_pipeline(result.frame, space, result.taxonomy);
    const auto icc = compute_icc(canonical.frame, space.canonical);

    // Rank-preserving emission chains give exact unit correlation; the
    // rolling-median families are merely near-perfect.
    for (const auto& name : {"cumulative", "latency", "network", "state"})
        CHECK(icc.per_segment.at(name).icc == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& name : {"pressure", "structural"})
        CHECK(icc.per_segment.at(name).icc > 0.99);
}

TEST_CASE("fault events trail latent excursions by the configured lead") {
    auto config = small_config(7, 3000);
    const auto result = generate_telemetry(config);
    REQUIRE_FALSE(result.faults.events.empty());
    const std::set<std::int64_t> stamps(result.frame.timestamps.begin(),
                                        result.frame.timestamps.end());
    std::int64_t prev = 0;
    for (const auto& event : result.faults.events) {
        // Each fault is anchored exactly fault_lead after a sample time.
        CHECK(stamps.count(event.timestamp - config.fault_lead) == 1);
        CHECK(event.magnitude >= 0.0);
        if (prev != 0) CHECK(event.timestamp - prev >= config.fault_refractory);
        prev = event.timestamp;
    }

    // Changing only the lead shifts every event by the difference.
    auto shifted_config = config;
    shifted_config.fault_lead = 300;
    const auto shifted = generate_telemetry(shifted_config);
    REQUIRE(shifted.faults.events.size() == result.faults.events.size());
    for (std::size_t i = 0; i < result.faults.events.size(); ++i)
        CHECK(shifted.faults.events[i].timestamp ==
              result.faults.events[i].timestamp + (300 - config.fault_lead));
}

TEST_CASE("residual features stay decoupled from the canonical space") {
    const std::size_t T = 1500;
    const auto result = generate_telemetry(small_config(7, T));
    const auto space = assign_segments(result.frame, result.taxonomy);
    const auto [canonical, residual] =
        apply_pipeline(result.frame, space, result.taxonomy);

    // Independent streams: per-pair |rho| stays within a generous
    // multiple of the 1/sqrt(T) sampling scale, and the average is an
    // order of magnitude smaller.
    const double per_pair_bound = 4.5 / std::sqrt(static_cast<double>(T));
    double acc = 0.0;
    std::size_t n_pairs = 0;
    for (const auto& cf : canonical.frame.columns) {
        for (const auto& rf : residual.frame.columns) {
            const double rho =
                spearman(canonical.frame.col(cf), residual.frame.col(rf));
            CHECK(std::abs(rho) < per_pair_bound);
            acc += std::abs(rho);
            ++n_pairs;
        }
    }
    CHECK(acc / static_cast<double>(n_pairs) < 1.5 / std::sqrt(static_cast<double>(T)));
}

TEST_CASE("planted duplicates are exact copies that pruning removes") {
    auto config = small_config();
    config.planted_duplicates = 2;
    const auto result = generate_telemetry(config);
    CHECK(result.frame.n_cols() == 6 * 4 + 20 + 2);

    const auto& original = result.frame.col("synth_cumulative_00");
    const auto& copy = result.frame.col("synth_cumulative_dup");
    CHECK(original == copy);

    const auto space = assign_segments(result.frame, result.taxonomy);
    const auto [canonical, residual] =
        apply_pipeline(result.frame, space, result.taxonomy);
    const auto prune = run_pruning(canonical.frame, space.canonical, 0.95);
    std::vector<std::string> removed_names;
    for (const auto& [segment, removed] : prune.removed)
        for (const auto& r : removed) removed_names.push_back(r.feature);
    CHECK(std::find(removed_names.begin(), removed_names.end(),
                    "synth_cumulative_dup") != removed_names.end());
    CHECK(std::find(removed_names.begin(), removed_names.end(),
                    "synth_latency_dup") != removed_names.end());
}

TEST_CASE("ground-truth taxonomy validates against the parser rules") {
    const auto result = generate_telemetry(small_config());
    CHECK_NOTHROW(validate_taxonomy(result.taxonomy));
}
