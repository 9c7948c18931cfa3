// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semseg/frame.hpp"
#include "semseg/transforms.hpp"

namespace semseg {

struct SegmentIcc {
    double icc = 0.0;
    std::size_t n_pairs = 0;
};

struct PairIcor {
    double icor = 0.0;
    std::size_t n_pairs = 0;
};

struct UTestResult {
    double u = 0.0;
    double p_value = 1.0;
    std::size_t n_in = 0;
    std::size_t n_out = 0;
    bool exact = false;
};

/// ICC/ICOR summary over a segmented feature space. A report is
/// `partial` when fewer than two segments were usable, in which case
/// the inter-segment fields are absent.
struct CorrelationReport {
    std::map<std::string, SegmentIcc> per_segment_icc;
    std::map<std::pair<std::string, std::string>, PairIcor> icor_pairs;
    std::map<std::pair<std::string, std::string>, double> icor_pair_medians;
    double icc_micro = 0.0;
    double icc_macro = 0.0;
    std::optional<double> icor_micro;
    std::optional<double> icor_macro;
    std::optional<double> delta;
    std::optional<UTestResult> utest;
    std::vector<double> omega_in;
    std::vector<double> omega_out;
    std::vector<std::string> skipped_constant_features;
    std::vector<std::string> excluded_segments;
    bool partial = false;
};

using SegmentMap = std::vector<std::pair<std::string, std::vector<std::string>>>;

struct IccData {
    std::map<std::string, SegmentIcc> per_segment;
    std::vector<double> omega_in;
    std::vector<std::string> skipped_constant_features;
    std::vector<std::string> excluded_segments;
};

struct IcorData {
    std::map<std::pair<std::string, std::string>, PairIcor> pairs;
    std::map<std::pair<std::string, std::string>, double> pair_medians;
    std::vector<double> omega_out;
};

/// Spearman rho over mid-ranks; see stats.hpp. Declared here because
/// this module owns the pairwise-analysis contract.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

/// Intra-segment correlations. Segments with fewer than two usable
/// (non-constant) features are excluded and reported. Throws
/// DataError when no segment is usable.
IccData compute_icc(const MetricFrame& frame, const SegmentMap& segments);

/// Inter-segment correlations over all cross pairs of usable
/// segments. Throws InsufficientDataError with fewer than two usable
/// segments.
IcorData compute_icor(const MetricFrame& frame, const SegmentMap& segments);

/// Pools the two analyses into a report. With a single usable
/// segment the ICOR fields stay absent and partial is set.
CorrelationReport summarize(const IccData& icc, const std::optional<IcorData>& icor);

/// Convenience: compute_icc + compute_icor (when >= 2 usable
/// segments) + summarize + one-sided Mann-Whitney on omega_in vs
/// omega_out.
CorrelationReport analyze_separability(const MetricFrame& frame,
                                       const SegmentMap& segments);

/// One-sided Mann-Whitney U: alternative "sample_in stochastically
/// greater". Exact enumeration when n_in + n_out <= 20, otherwise
/// normal approximation with tie correction and continuity
/// correction.
UTestResult mann_whitney_one_sided(const std::vector<double>& sample_in,
                                   const std::vector<double>& sample_out);

struct ShiftTestResult {
    double icc_shift = 0.0;
    double icor_shift = 0.0;
    std::vector<double> per_repeat_icc;
    std::vector<double> per_repeat_icor;
};

struct ShiftTestOptions {
    std::size_t repeats = 20;
    std::uint64_t seed = 0;
    /// Testing hooks: force every offset to a fixed value, or shift
    /// all columns by one shared random offset per repeat.
    std::optional<std::size_t> forced_offset;
    bool paired_offsets = false;
};

/// Circularly shifts every column by an independent seeded offset in
/// [1, T-1] and recomputes the micro statistics; returns means over
/// repeats.
ShiftTestResult circular_shift_test(const MetricFrame& frame,
                                    const SegmentMap& segments,
                                    const ShiftTestOptions& options);

/// Circular rotation helper: result[t] = values[(t + offset) mod T].
std::vector<double> circular_shift(const std::vector<double>& values,
                                   std::size_t offset);

} // namespace semseg
