// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace semseg {

/// One row of a long-format telemetry export.
struct LongRecord {
    std::int64_t timestamp = 0;
    std::string metric_name;
    double value = 0.0;
};

/// Sentinel for an absent cell. Stored as quiet NaN; use is_missing
/// rather than comparing directly.
double missing_value();
bool is_missing(double v);

/// Time-indexed wide matrix. Storage is column-major: values[c][t]
/// is the entry for column c at row t.
struct MetricFrame {
    std::vector<std::int64_t> timestamps;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> values;

    std::size_t n_rows() const { return timestamps.size(); }
    std::size_t n_cols() const { return columns.size(); }

    /// Index of a named column; throws ConfigError when absent.
    std::size_t col_index(const std::string& name) const;
    bool has_column(const std::string& name) const;

    const std::vector<double>& col(const std::string& name) const;

    /// Checks the structural invariants: strictly increasing
    /// timestamps, unique column names, matching dimensions.
    /// Throws DataError on violation.
    void validate() const;

    /// New frame with only the named columns, in the given order.
    MetricFrame select(const std::vector<std::string>& names) const;
};

/// Serializes a frame back to long records, row-major, skipping
/// MISSING cells.
std::vector<LongRecord> frame_to_long(const MetricFrame& frame);

/// Wide CSV round-trip. The header is `timestamp,<col>,...`; cells
/// are written with enough digits to reproduce the double exactly;
/// MISSING cells are written empty.
void write_wide_csv(const MetricFrame& frame, const std::string& path);
MetricFrame read_wide_csv(const std::string& path);

/// Long CSV with header `timestamp,metric,value`, one record per row.
void write_long_csv(const std::vector<LongRecord>& records,
                    const std::string& path);

} // namespace semseg
