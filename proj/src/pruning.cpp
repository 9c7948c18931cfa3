// SPDX-License-Identifier: Apache-2.0
#include "semseg/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semseg/errors.hpp"

namespace semseg {

std::vector<MstEdge> corr_distance_mst(const std::vector<std::string>& names,
                                       const std::vector<std::vector<double>>& rho) {
    const std::size_t n = names.size();
    if (rho.size() != n) throw DataError("corr_distance_mst: matrix size mismatch");
    for (const auto& row : rho)
        if (row.size() != n) throw DataError("corr_distance_mst: ragged matrix");
    if (n < 2) return {};

    struct Candidate {
        double weight;
        std::size_t i, j; // names[i] < names[j]
    };
    std::vector<Candidate> candidates;
    candidates.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto [lo, hi] =
                names[i] < names[j] ? std::make_pair(i, j) : std::make_pair(j, i);
            candidates.push_back({1.0 - std::abs(rho[i][j]), lo, hi});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](const Candidate& x, const Candidate& y) {
                  if (x.weight != y.weight) return x.weight < y.weight;
                  if (names[x.i] != names[y.i]) return names[x.i] < names[y.i];
                  return names[x.j] < names[y.j];
              });

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    const auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    std::vector<MstEdge> edges;
    for (const auto& c : candidates) {
        const std::size_t ri = find(c.i);
        const std::size_t rj = find(c.j);
        if (ri == rj) continue;
        parent[ri] = rj;
        edges.push_back({names[c.i], names[c.j], c.weight, rho[c.i][c.j]});
        if (edges.size() == n - 1) break;
    }
    return edges;
}

namespace {

struct IndexedEdge {
    std::size_t i, j; // indices into the retained-feature list
    double abs_rho;
    double rho;
};

} // namespace

SegmentPrune prune_segment(const std::vector<std::string>& features,
                           const std::vector<std::vector<double>>& rho,
                           double tau_red,
                           const std::set<std::string>& keep_list) {
    if (tau_red <= 0.0 || tau_red > 1.0)
        throw ConfigError("prune_segment: tau_red must lie in (0, 1]");
    if (rho.size() != features.size())
        throw DataError("prune_segment: matrix size mismatch");

    std::vector<std::size_t> retained(features.size());
    std::iota(retained.begin(), retained.end(), std::size_t{0});
    SegmentPrune result;

    while (retained.size() >= 2) {
        std::vector<std::string> names;
        names.reserve(retained.size());
        for (std::size_t idx : retained) names.push_back(features[idx]);
        std::vector<std::vector<double>> sub(retained.size(),
                                             std::vector<double>(retained.size()));
        for (std::size_t a = 0; a < retained.size(); ++a)
            for (std::size_t b = 0; b < retained.size(); ++b)
                sub[a][b] = rho[retained[a]][retained[b]];

        const auto mst = corr_distance_mst(names, sub);
        std::vector<MstEdge> qualifying;
        for (const auto& edge : mst)
            if (std::abs(edge.rho) >= tau_red) qualifying.push_back(edge);
        std::sort(qualifying.begin(), qualifying.end(),
                  [](const MstEdge& x, const MstEdge& y) {
                      if (x.weight != y.weight) return x.weight < y.weight;
                      if (x.a != y.a) return x.a < y.a;
                      return x.b < y.b;
                  });

        const auto sum_abs_rho = [&](const std::string& name) {
            const std::size_t self = static_cast<std::size_t>(
                std::find(names.begin(), names.end(), name) - names.begin());
            double acc = 0.0;
            for (std::size_t b = 0; b < names.size(); ++b)
                if (b != self) acc += std::abs(sub[self][b]);
            return acc;
        };

        bool removed_one = false;
        for (const auto& edge : qualifying) {
            const bool keep_a = keep_list.count(edge.a) > 0;
            const bool keep_b = keep_list.count(edge.b) > 0;
            if (keep_a && keep_b) continue;
            std::string victim;
            if (keep_a) {
                victim = edge.b;
            } else if (keep_b) {
                victim = edge.a;
            } else {
                const double sum_a = sum_abs_rho(edge.a);
                const double sum_b = sum_abs_rho(edge.b);
                if (sum_a > sum_b)
                    victim = edge.a;
                else if (sum_b > sum_a)
                    victim = edge.b;
                else
                    victim = std::max(edge.a, edge.b);
            }
            const std::string partner = (victim == edge.a) ? edge.b : edge.a;
            result.removed.push_back({victim, "redundant", partner, edge.rho});
            retained.erase(std::find_if(retained.begin(), retained.end(),
                                        [&](std::size_t idx) {
                                            return features[idx] == victim;
                                        }));
            removed_one = true;
            break;
        }
        if (!removed_one) break;
    }

    for (std::size_t idx : retained) result.retained.push_back(features[idx]);
    return result;
}

std::vector<std::vector<double>> segment_corr_matrix(
    const MetricFrame& frame, const std::vector<std::string>& features) {
    const std::size_t n = features.size();
    std::vector<const std::vector<double>*> cols;
    cols.reserve(n);
    for (const auto& name : features) cols.push_back(&frame.col(name));
    std::vector<std::vector<double>> rho(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        rho[i][i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double value = 0.0;
            try {
                value = spearman_rho(*cols[i], *cols[j]);
            } catch (const UndefinedCorrelationError&) {
                value = 0.0; // constant column: maximal distance
            }
            rho[i][j] = rho[j][i] = value;
        }
    }
    return rho;
}

PruneResult run_pruning(const MetricFrame& frame, const SegmentMap& segments,
                        double tau_red, const std::set<std::string>& keep_list) {
    PruneResult result;
    result.tau_red = tau_red;
    result.pre_report = analyze_separability(frame, segments);

    for (const auto& [name, features] : segments) {
        const auto rho = segment_corr_matrix(frame, features);
        result.mst_edges[name] = corr_distance_mst(features, rho);
        auto pruned = prune_segment(features, rho, tau_red, keep_list);
        result.removed[name] = std::move(pruned.removed);
        result.retained.emplace_back(name, std::move(pruned.retained));
    }

    result.post_report = analyze_separability(frame, result.retained);
    result.icc_micro_delta =
        std::abs(result.post_report.icc_micro - result.pre_report.icc_micro);
    if (result.post_report.icor_micro && result.pre_report.icor_micro)
        result.icor_micro_delta =
            std::abs(*result.post_report.icor_micro - *result.pre_report.icor_micro);
    return result;
}

} // namespace semseg
