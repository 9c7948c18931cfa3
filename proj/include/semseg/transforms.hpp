// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "semseg/frame.hpp"
#include "semseg/taxonomy.hpp"

namespace semseg {

struct RollingBaseline {
    std::size_t window_w = 12;
    double epsilon = 1e-6;
};

/// Per-column provenance: which transform and normalization produced
/// the column, plus any flags raised (e.g. degenerate scale).
struct ColumnProvenance {
    std::string transform;
    std::string normalization;
    std::vector<std::string> flags;
};

struct TransformedFrame {
    MetricFrame frame;
    std::map<std::string, ColumnProvenance> provenance;
};

/// Counter-to-rate: max(0, x_t - x_{t-1}). Length shrinks by one.
std::vector<double> transform_mcr(const std::vector<double>& series);

/// ln(1 + x) elementwise; negative input is a domain error.
std::vector<double> transform_ltc(const std::vector<double>& series);

/// Ratio to a trailing rolling median: x_t / (median + eps). The
/// first window_w - 1 warmup samples are dropped.
std::vector<double> transform_bsr(const std::vector<double>& series,
                                  const RollingBaseline& baseline);

/// Clipped first difference per elapsed second. Length shrinks by one.
std::vector<double> transform_network_rate(const std::vector<double>& series,
                                           const std::vector<std::int64_t>& timestamps);

/// Deviation from the global median, scaled by its magnitude:
/// (x_t - med) / (|med| + eps). Full length preserved.
std::vector<double> transform_gbd(const std::vector<double>& series,
                                  double epsilon = 1e-6);

/// Relative deviation from a trailing rolling median; warmup dropped.
std::vector<double> transform_rbdr(const std::vector<double>& series,
                                   const RollingBaseline& baseline);

/// (x - median) / IQR with linear-interpolation quantiles. A
/// degenerate IQR (< 1e-12) falls back to shift-only; the flag
/// output reports it.
std::vector<double> robust_scale(const std::vector<double>& series,
                                 bool* degenerate_flag = nullptr);

/// Residual-family treatment, dispatched on the family transform id
/// (RESID_NONE, RESID_SQRT, RESID_LOG1P, RESID_DIFF). Each id bundles
/// its own normalization step.
std::vector<double> transform_residual(const std::vector<double>& series,
                                       const std::string& family_id,
                                       bool* degenerate_flag = nullptr);

/// Applies each segment's (transform, normalization) pair to its
/// columns and trims everything to the shared post-warmup range so
/// the two output frames are rectangular and time-aligned.
std::pair<TransformedFrame, TransformedFrame> apply_pipeline(
    const MetricFrame& frame, const SegmentedSpace& space,
    const SegmentTaxonomy& taxonomy, const RollingBaseline& baseline = {});

} // namespace semseg
