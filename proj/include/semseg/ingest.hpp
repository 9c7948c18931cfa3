// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "semseg/frame.hpp"

namespace semseg {

struct LoadResult {
    std::vector<LongRecord> records;
    std::size_t skipped = 0;
};

/// Parses a long-format CSV with header `timestamp,metric,value`.
/// Rows whose value (or timestamp) does not parse, is non-finite, or
/// whose metric name is empty are skipped and counted.
LoadResult load_long_metrics(const std::string& path);

struct PivotResult {
    MetricFrame frame;
    std::size_t duplicates = 0;
};

/// Long-to-wide pivot: rows sorted by timestamp, columns sorted
/// lexicographically, absent pairs MISSING, duplicate pairs resolved
/// last occurrence wins.
PivotResult pivot_to_wide(const std::vector<LongRecord>& records);

struct DroppedColumn {
    std::string name;
    std::string reason; // "high_missing" or "zero_variance"
};

struct CleaningSummary {
    std::vector<DroppedColumn> dropped;
    std::size_t filled_cells = 0;
};

struct CleanResult {
    MetricFrame frame;
    CleaningSummary summary;
};

/// Drops columns whose missing fraction exceeds the threshold, fills
/// the rest by backward fill (trailing gaps forward-filled), then
/// drops columns whose filled values are all exactly equal.
CleanResult clean_frame(const MetricFrame& frame, double max_missing_fraction = 0.5);

} // namespace semseg
