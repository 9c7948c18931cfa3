// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "semseg/separability.hpp"

namespace semseg {

/// MST edge over correlation distance. Endpoint names are stored
/// with a < b lexicographically; weight = 1 - |rho|.
struct MstEdge {
    std::string a;
    std::string b;
    double weight = 0.0;
    double rho = 0.0;
};

struct RemovedFeature {
    std::string feature;
    std::string reason;
    std::string partner;
    double rho = 0.0;
};

struct SegmentPrune {
    std::vector<std::string> retained;
    std::vector<RemovedFeature> removed;
};

struct PruneResult {
    SegmentMap retained;
    std::map<std::string, std::vector<RemovedFeature>> removed;
    std::map<std::string, std::vector<MstEdge>> mst_edges;
    CorrelationReport pre_report;
    CorrelationReport post_report;
    double icc_micro_delta = 0.0;
    double icor_micro_delta = 0.0;
    double tau_red = 0.0;
};

/// Kruskal MST under d = 1 - |rho|, ties broken by lexicographic
/// (a, b). The matrix must be symmetric with unit diagonal; n < 2
/// yields an empty edge list.
std::vector<MstEdge> corr_distance_mst(const std::vector<std::string>& names,
                                       const std::vector<std::vector<double>>& rho);

/// Removes redundant features until no retained pair reaches
/// tau_red. Each round rebuilds the MST over the retained set and
/// resolves its strongest qualifying edge: the endpoint with the
/// larger sum of |rho| to the other retained features is removed
/// (keep_list overrides; lexicographically larger name on ties).
/// Rebuilding between removals makes the operation idempotent.
SegmentPrune prune_segment(const std::vector<std::string>& features,
                           const std::vector<std::vector<double>>& rho,
                           double tau_red,
                           const std::set<std::string>& keep_list);

/// Per-segment pruning plus pre/post separability reports computed
/// with identical methodology, and the quasi-invariance deltas.
PruneResult run_pruning(const MetricFrame& frame, const SegmentMap& segments,
                        double tau_red = 0.95,
                        const std::set<std::string>& keep_list = {});

/// Signed Spearman matrix over the named columns with unit diagonal.
/// Pairs involving a constant column get rho = 0 (distance 1).
std::vector<std::vector<double>> segment_corr_matrix(
    const MetricFrame& frame, const std::vector<std::string>& features);

} // namespace semseg
