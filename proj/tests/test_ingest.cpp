// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "semseg/errors.hpp"
#include "semseg/frame.hpp"
#include "semseg/ingest.hpp"
#include "support/test_util.hpp"

using namespace semseg;
using test_util::TempDir;
using test_util::write_file;

TEST_CASE("load_long_metrics parses well-formed rows") {
    TempDir dir("ingest");
    write_file(dir.file("ok.csv"), "timestamp,metric,value\n10,a,1.0\n10,b,2.0\n");
    const auto result = load_long_metrics(dir.file("ok.csv"));
    REQUIRE(result.records.size() == 2);
    CHECK(result.skipped == 0);
    CHECK(result.records[0].timestamp == 10);
    CHECK(result.records[0].metric_name == "a");
    CHECK(result.records[0].value == 1.0);
}

TEST_CASE("load_long_metrics handles header-only and bad-value rows") {
    TempDir dir("ingest");
    write_file(dir.file("empty.csv"), "timestamp,metric,value\n");
    const auto empty = load_long_metrics(dir.file("empty.csv"));
    CHECK(empty.records.empty());
    CHECK(empty.skipped == 0);

    write_file(dir.file("bad.csv"),
               "timestamp,metric,value\n10,a,oops\n20,a,1\n30,a,2\n40,a,3\n");
    const auto bad = load_long_metrics(dir.file("bad.csv"));
    CHECK(bad.records.size() == 3);
    CHECK(bad.skipped == 1);
}

TEST_CASE("load_long_metrics rejects missing files and wrong headers") {
    TempDir dir("ingest");
    CHECK_THROWS_AS(load_long_metrics(dir.file("absent.csv")), IoError);
    write_file(dir.file("hdr.csv"), "time,name,val\n1,a,2\n");
    CHECK_THROWS_AS(load_long_metrics(dir.file("hdr.csv")), FormatError);
}

TEST_CASE("pivot_to_wide sorts rows and columns and marks absent pairs") {
    const std::vector<LongRecord> records = {
        {10, "a", 1.0}, {20, "a", 2.0}, {10, "b", 5.0}};
    const auto result = pivot_to_wide(records);
    const auto& frame = result.frame;
    REQUIRE(frame.n_rows() == 2);
    REQUIRE(frame.n_cols() == 2);
    CHECK(frame.timestamps == std::vector<std::int64_t>{10, 20});
    CHECK(frame.columns == std::vector<std::string>{"a", "b"});
    CHECK(frame.col("a")[0] == 1.0);
    CHECK(frame.col("a")[1] == 2.0);
    CHECK(frame.col("b")[0] == 5.0);
    CHECK(is_missing(frame.col("b")[1]));
    CHECK(result.duplicates == 0);
}

TEST_CASE("pivot_to_wide resolves duplicates last-wins") {
    const auto result = pivot_to_wide({{10, "a", 1.0}, {10, "a", 3.0}});
    REQUIRE(result.frame.n_rows() == 1);
    REQUIRE(result.frame.n_cols() == 1);
    CHECK(result.frame.col("a")[0] == 3.0);
    CHECK(result.duplicates == 1);
}

TEST_CASE("pivot_to_wide handles a single record and rejects empty input") {
    const auto single = pivot_to_wide({{5, "x", 2.5}});
    CHECK(single.frame.n_rows() == 1);
    CHECK(single.frame.n_cols() == 1);
    CHECK_THROWS_AS(pivot_to_wide({}), DataError);
}

TEST_CASE("pivot round-trips through long serialization") {
    const std::vector<LongRecord> records = {
        {10, "a", 1.0}, {20, "a", 2.0}, {10, "b", 5.0}, {20, "b", 6.0}};
    const auto first = pivot_to_wide(records);
    const auto second = pivot_to_wide(frame_to_long(first.frame));
    CHECK(second.frame.timestamps == first.frame.timestamps);
    CHECK(second.frame.columns == first.frame.columns);
    CHECK(second.frame.values == first.frame.values);
}

namespace {

MetricFrame frame_with_missing() {
    // a: backward-fillable gaps; b: zero variance; c: mostly missing.
    MetricFrame frame;
    frame.timestamps = {0, 30, 60, 90};
    frame.columns = {"a", "b", "c"};
    const double miss = missing_value();
    frame.values = {{miss, 2.0, miss, 4.0},
                    {7.0, 7.0, 7.0, 7.0},
                    {miss, miss, miss, 1.0}};
    return frame;
}

} // namespace

TEST_CASE("clean_frame fills backward, drops zero variance and high missing") {
    const auto result = clean_frame(frame_with_missing(), 0.6);
    const auto& frame = result.frame;
    REQUIRE(frame.n_cols() == 1);
    CHECK(frame.columns[0] == "a");
    CHECK(frame.col("a") == std::vector<double>{2.0, 2.0, 4.0, 4.0});
    REQUIRE(result.summary.dropped.size() == 2);
    CHECK(result.summary.dropped[0].name == "b");
    CHECK(result.summary.dropped[0].reason == "zero_variance");
    CHECK(result.summary.dropped[1].name == "c");
    CHECK(result.summary.dropped[1].reason == "high_missing");
    CHECK(result.summary.filled_cells == 2);
}

TEST_CASE("clean_frame forward-fills trailing gaps") {
    MetricFrame frame;
    frame.timestamps = {0, 30, 60};
    frame.columns = {"a"};
    frame.values = {{1.0, 2.0, missing_value()}};
    const auto result = clean_frame(frame, 0.5);
    CHECK(result.frame.col("a") == std::vector<double>{1.0, 2.0, 2.0});
}

TEST_CASE("clean_frame errors when everything is dropped") {
    MetricFrame frame;
    frame.timestamps = {0, 30};
    frame.columns = {"flat"};
    frame.values = {{3.0, 3.0}};
    CHECK_THROWS_AS(clean_frame(frame, 0.5), DataError);
}

TEST_CASE("cleaning is column-local") {
    auto frame = frame_with_missing();
    frame.columns.push_back("d");
    frame.values.push_back({10.0, 11.0, 12.0, 13.0});
    const auto result = clean_frame(frame, 0.6);
    CHECK(result.frame.col("d") == std::vector<double>{10.0, 11.0, 12.0, 13.0});
    CHECK(result.frame.col("a") == std::vector<double>{2.0, 2.0, 4.0, 4.0});
}

TEST_CASE("wide CSV round-trip preserves values exactly") {
    TempDir dir("wide");
    MetricFrame frame;
    frame.timestamps = {0, 30, 60, 90};
    frame.columns = {"x", "y"};
    frame.values = {{0.1, 1.0 / 3.0, -2.5e-7, 4e12},
                    {1.0, 2.0, 3.0, std::nextafter(3.0, 4.0)}};
    write_wide_csv(frame, dir.file("f.csv"));
    const auto back = read_wide_csv(dir.file("f.csv"));
    CHECK(back.timestamps == frame.timestamps);
    CHECK(back.columns == frame.columns);
    CHECK(back.values == frame.values);
}

TEST_CASE("frame validate rejects structural violations") {
    MetricFrame frame;
    frame.timestamps = {10, 10};
    frame.columns = {"a"};
    frame.values = {{1.0, 2.0}};
    CHECK_THROWS_AS(frame.validate(), DataError); // duplicate timestamp

    frame.timestamps = {10, 20};
    frame.columns = {"a", "a"};
    frame.values = {{1.0, 2.0}, {1.0, 2.0}};
    CHECK_THROWS_AS(frame.validate(), DataError); // duplicate column

    frame.columns = {"a", "b"};
    frame.values = {{1.0, 2.0}, {1.0}};
    CHECK_THROWS_AS(frame.validate(), DataError); // ragged column
}
