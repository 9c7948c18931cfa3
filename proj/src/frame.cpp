// SPDX-License-Identifier: Apache-2.0
#include "semseg/frame.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "semseg/errors.hpp"

namespace semseg {

double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

bool is_missing(double v) { return std::isnan(v); }

std::size_t MetricFrame::col_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ConfigError("unknown column: " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

bool MetricFrame::has_column(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

const std::vector<double>& MetricFrame::col(const std::string& name) const {
    return values[col_index(name)];
}

void MetricFrame::validate() const {
    if (columns.size() != values.size())
        throw DataError("frame: column/value count mismatch");
    for (const auto& v : values)
        if (v.size() != timestamps.size())
            throw DataError("frame: ragged column length");
    for (std::size_t t = 1; t < timestamps.size(); ++t)
        if (timestamps[t] <= timestamps[t - 1])
            throw DataError("frame: timestamps not strictly increasing");
    std::set<std::string> seen;
    for (const auto& name : columns)
        if (!seen.insert(name).second)
            throw DataError("frame: duplicate column name " + name);
}

MetricFrame MetricFrame::select(const std::vector<std::string>& names) const {
    MetricFrame out;
    out.timestamps = timestamps;
    for (const auto& name : names) {
        out.columns.push_back(name);
        out.values.push_back(values[col_index(name)]);
    }
    return out;
}

std::vector<LongRecord> frame_to_long(const MetricFrame& frame) {
    std::vector<LongRecord> records;
    for (std::size_t t = 0; t < frame.n_rows(); ++t)
        for (std::size_t c = 0; c < frame.n_cols(); ++c)
            if (!is_missing(frame.values[c][t]))
                records.push_back({frame.timestamps[t], frame.columns[c],
                                   frame.values[c][t]});
    return records;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // Prefer the shortest representation that round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(shorter, "%lf", &back);
        if (back == v) return shorter;
    }
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
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

} // namespace

void write_wide_csv(const MetricFrame& frame, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "timestamp";
    for (const auto& name : frame.columns) out << ',' << name;
    out << '\n';
    for (std::size_t t = 0; t < frame.n_rows(); ++t) {
        out << frame.timestamps[t];
        for (std::size_t c = 0; c < frame.n_cols(); ++c) {
            out << ',';
            if (!is_missing(frame.values[c][t]))
                out << format_double(frame.values[c][t]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_long_csv(const std::vector<LongRecord>& records,
                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "timestamp,metric,value\n";
    for (const auto& r : records)
        out << r.timestamp << ',' << r.metric_name << ','
            << format_double(r.value) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

MetricFrame read_wide_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty file: " + path);
    auto header = split_csv_line(line);
    if (header.empty() || header[0] != "timestamp")
        throw FormatError("wide CSV must start with a timestamp column: " + path);
    MetricFrame frame;
    frame.columns.assign(header.begin() + 1, header.end());
    frame.values.assign(frame.columns.size(), {});
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw FormatError("row width mismatch in " + path);
        std::int64_t ts = 0;
        auto [p, ec] = std::from_chars(fields[0].data(),
                                       fields[0].data() + fields[0].size(), ts);
        if (ec != std::errc{} || p != fields[0].data() + fields[0].size())
            throw FormatError("bad timestamp in " + path + ": " + fields[0]);
        frame.timestamps.push_back(ts);
        for (std::size_t c = 0; c < frame.columns.size(); ++c) {
            const std::string& cell = fields[c + 1];
            if (cell.empty()) {
                frame.values[c].push_back(missing_value());
            } else {
                try {
                    std::size_t used = 0;
                    const double v = std::stod(cell, &used);
                    if (used != cell.size()) throw std::invalid_argument(cell);
                    frame.values[c].push_back(v);
                } catch (const std::exception&) {
                    throw FormatError("bad value in " + path + ": " + cell);
                }
            }
        }
    }
    frame.validate();
    return frame;
}

} // namespace semseg
