// SPDX-License-Identifier: Apache-2.0
#include "semseg/pipeline.hpp"

namespace semseg {

AnalyzeResult run_analysis(const MetricFrame& clean_frame,
                           const SegmentTaxonomy& taxonomy,
                           const AnalyzeOptions& options) {
    AnalyzeResult result;
    result.space = assign_segments(clean_frame, taxonomy);
    auto [canonical, residual] =
        apply_pipeline(clean_frame, result.space, taxonomy, options.baseline);
    result.canonical = std::move(canonical);
    result.residual = std::move(residual);

    SegmentMap canonical_map;
    for (const auto& [segment, features] : result.space.canonical)
        if (!features.empty()) canonical_map.emplace_back(segment, features);

    result.prune = run_pruning(result.canonical.frame, canonical_map,
                               options.tau_red, taxonomy.keep_list);

    ShiftTestOptions shift_options;
    shift_options.repeats = options.shift_repeats;
    shift_options.seed = options.seed;
    result.shift =
        circular_shift_test(result.canonical.frame, canonical_map, shift_options);
    return result;
}

namespace {

TransformedFrame select_columns(const TransformedFrame& source,
                                const std::vector<std::string>& names) {
    TransformedFrame out;
    out.frame = source.frame.select(names);
    for (const auto& name : names) {
        const auto it = source.provenance.find(name);
        if (it != source.provenance.end()) out.provenance[name] = it->second;
    }
    return out;
}

} // namespace

EvaluateResult run_evaluation(const MetricFrame& clean_frame,
                              const SegmentTaxonomy& taxonomy,
                              const FaultLog& faults,
                              const AnalyzeOptions& options,
                              const EvalConfig& config) {
    EvaluateResult result;
    result.analysis = run_analysis(clean_frame, taxonomy, options);

    std::vector<std::string> retained_features;
    for (const auto& [segment, features] : result.analysis.prune.retained)
        retained_features.insert(retained_features.end(), features.begin(),
                                 features.end());
    result.canonical_pruned = select_columns(result.analysis.canonical,
                                             retained_features);
    result.full = concat_frames(result.canonical_pruned, result.analysis.residual);
    result.report = compare_representations(result.canonical_pruned,
                                            result.analysis.residual, result.full,
                                            faults, config);
    return result;
}

} // namespace semseg
