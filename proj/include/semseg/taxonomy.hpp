// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "semseg/frame.hpp"

namespace semseg {

/// One declared group of features, canonical segment or residual
/// family, with its transform and normalization ids.
struct SegmentRule {
    std::string name;
    std::string transform;
    std::string normalization;
    std::vector<std::string> patterns;
};

struct SegmentTaxonomy {
    std::vector<SegmentRule> canonical_segments;
    std::vector<SegmentRule> residual_families;
    std::set<std::string> keep_list;
};

/// Column-name partition induced by a taxonomy. Map iteration order
/// is the declaration order of the source rules.
struct SegmentedSpace {
    std::vector<std::pair<std::string, std::vector<std::string>>> canonical;
    std::vector<std::pair<std::string, std::vector<std::string>>> residual;
    std::vector<std::string> unmatched;

    std::vector<std::string> canonical_features() const;
    std::vector<std::string> residual_features() const;
};

/// Glob match with `*` (any run) and `?` (any single char).
bool glob_match(const std::string& pattern, const std::string& text);

/// Validates ids against the closed transform/normalization sets and
/// checks name uniqueness.
void validate_taxonomy(const SegmentTaxonomy& taxonomy);

SegmentTaxonomy parse_taxonomy(const std::string& path);
SegmentTaxonomy parse_taxonomy_text(const std::string& json_text);

/// Partitions the frame's columns: canonical rules first in
/// declaration order, then residual rules, first match wins; the
/// remainder lands in `unmatched`. Columns are matched in sorted
/// order so the result is independent of frame column order.
/// Throws DataError when no column matches any canonical segment.
SegmentedSpace assign_segments(const MetricFrame& frame,
                               const SegmentTaxonomy& taxonomy);

} // namespace semseg
