// SPDX-License-Identifier: Apache-2.0
#include "semseg/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "semseg/errors.hpp"

namespace semseg {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

bool parse_int(const std::string& text, std::int64_t& out) {
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && p == text.data() + text.size();
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    try {
        std::size_t used = 0;
        out = std::stod(text, &used);
        return used == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

LoadResult load_long_metrics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("missing header in " + path);
    auto header = split_line(line);
    if (header != std::vector<std::string>{"timestamp", "metric", "value"})
        throw FormatError("expected header timestamp,metric,value in " + path);

    LoadResult result;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_line(line);
        std::int64_t ts = 0;
        double value = 0.0;
        if (fields.size() != 3 || !parse_int(fields[0], ts) || fields[1].empty() ||
            !parse_double(fields[2], value) || !std::isfinite(value)) {
            ++result.skipped;
            continue;
        }
        result.records.push_back({ts, fields[1], value});
    }
    return result;
}

PivotResult pivot_to_wide(const std::vector<LongRecord>& records) {
    if (records.empty()) throw DataError("pivot_to_wide: empty input");

    std::set<std::int64_t> ts_set;
    std::set<std::string> name_set;
    for (const auto& r : records) {
        ts_set.insert(r.timestamp);
        name_set.insert(r.metric_name);
    }

    PivotResult result;
    MetricFrame& frame = result.frame;
    frame.timestamps.assign(ts_set.begin(), ts_set.end());
    frame.columns.assign(name_set.begin(), name_set.end());
    frame.values.assign(frame.n_cols(),
                        std::vector<double>(frame.n_rows(), missing_value()));

    std::map<std::int64_t, std::size_t> row_of;
    for (std::size_t t = 0; t < frame.n_rows(); ++t) row_of[frame.timestamps[t]] = t;
    std::map<std::string, std::size_t> col_of;
    for (std::size_t c = 0; c < frame.n_cols(); ++c) col_of[frame.columns[c]] = c;

    for (const auto& r : records) {
        double& cell = frame.values[col_of[r.metric_name]][row_of[r.timestamp]];
        if (!is_missing(cell)) ++result.duplicates;
        cell = r.value;
    }
    return result;
}

CleanResult clean_frame(const MetricFrame& frame, double max_missing_fraction) {
    if (frame.n_rows() < 2) throw DataError("clean_frame: need at least two rows");
    if (max_missing_fraction < 0.0 || max_missing_fraction > 1.0)
        throw ConfigError("clean_frame: max_missing_fraction outside [0, 1]");

    CleanResult result;
    result.frame.timestamps = frame.timestamps;
    const std::size_t T = frame.n_rows();

    for (std::size_t c = 0; c < frame.n_cols(); ++c) {
        const auto& source = frame.values[c];
        const auto missing =
            static_cast<std::size_t>(std::count_if(source.begin(), source.end(),
                                                   [](double v) { return is_missing(v); }));
        if (static_cast<double>(missing) >
            max_missing_fraction * static_cast<double>(T)) {
            result.summary.dropped.push_back({frame.columns[c], "high_missing"});
            continue;
        }

        std::vector<double> filled = source;
        // Backward fill: each gap takes the next later observation.
        for (std::size_t t = T; t-- > 0;) {
            if (is_missing(filled[t]) && t + 1 < T && !is_missing(filled[t + 1])) {
                filled[t] = filled[t + 1];
                ++result.summary.filled_cells;
            }
        }
        // Trailing gaps have no later observation; carry the last one forward.
        for (std::size_t t = 1; t < T; ++t) {
            if (is_missing(filled[t]) && !is_missing(filled[t - 1])) {
                filled[t] = filled[t - 1];
                ++result.summary.filled_cells;
            }
        }
        if (std::any_of(filled.begin(), filled.end(),
                        [](double v) { return is_missing(v); })) {
            // Only possible when the column had no observations at all.
            result.summary.dropped.push_back({frame.columns[c], "high_missing"});
            continue;
        }

        const bool constant = std::all_of(filled.begin(), filled.end(),
                                          [&](double v) { return v == filled[0]; });
        if (constant) {
            result.summary.dropped.push_back({frame.columns[c], "zero_variance"});
            continue;
        }

        result.frame.columns.push_back(frame.columns[c]);
        result.frame.values.push_back(std::move(filled));
    }

    if (result.frame.n_cols() == 0)
        throw DataError("clean_frame: every column was dropped");
    return result;
}

} // namespace semseg
