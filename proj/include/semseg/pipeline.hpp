// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "semseg/baselines.hpp"
#include "semseg/frame.hpp"
#include "semseg/prediction.hpp"
#include "semseg/pruning.hpp"
#include "semseg/separability.hpp"
#include "semseg/taxonomy.hpp"
#include "semseg/transforms.hpp"

namespace semseg {

struct AnalyzeOptions {
    double tau_red = 0.95;
    RollingBaseline baseline;      // rolling window + epsilon
    std::size_t shift_repeats = 20;
    std::uint64_t seed = 0;
};

struct AnalyzeResult {
    SegmentedSpace space;
    TransformedFrame canonical;
    TransformedFrame residual;
    PruneResult prune;
    ShiftTestResult shift;
};

/// taxonomy -> transforms -> separability (inside pruning's pre
/// report) -> pruning -> circular-shift test on the canonical space.
AnalyzeResult run_analysis(const MetricFrame& clean_frame,
                           const SegmentTaxonomy& taxonomy,
                           const AnalyzeOptions& options);

struct EvaluateResult {
    AnalyzeResult analysis;
    TransformedFrame canonical_pruned;
    TransformedFrame full;
    RiskReport report;
};

/// Full evaluation: analysis, canonical space restricted to the
/// pruned features, full space concatenation, and the four-way
/// representation comparison.
EvaluateResult run_evaluation(const MetricFrame& clean_frame,
                              const SegmentTaxonomy& taxonomy,
                              const FaultLog& faults,
                              const AnalyzeOptions& options,
                              const EvalConfig& config);

} // namespace semseg
