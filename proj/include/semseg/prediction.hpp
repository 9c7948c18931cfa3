// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semseg/frame.hpp"
#include "semseg/models.hpp"
#include "semseg/transforms.hpp"

namespace semseg {

struct FaultEvent {
    std::int64_t timestamp = 0;
    double magnitude = 0.0;
};

struct FaultLog {
    std::vector<FaultEvent> events; // sorted ascending by timestamp
};

/// CSV with header `timestamp,magnitude`. Events are sorted on load.
FaultLog load_fault_log(const std::string& path);
void write_fault_log(const FaultLog& log, const std::string& path);

/// y_t = 1 iff some fault time lies in (t, t + delta].
std::vector<int> label_horizon(const std::vector<std::int64_t>& timestamps,
                               const FaultLog& faults, std::int64_t delta);

struct LabeledDataset {
    std::vector<std::vector<double>> X; // row-major, one row per bin
    std::vector<int> y;
    std::vector<std::int64_t> timestamps; // bin starts
    std::vector<std::string> columns;
    std::int64_t horizon_delta = 0;
    std::int64_t aggregation_window = 0;
};

/// Bins rows into non-overlapping windows anchored at the first
/// timestamp: features by mean, labels by max, bin timestamp = bin
/// start. Empty bins are skipped. The window must be at least the
/// native cadence (the smallest timestamp gap).
LabeledDataset aggregate_frame(const MetricFrame& frame, const std::vector<int>& y,
                               std::int64_t window, std::int64_t delta = 0);

struct FoldSpan {
    std::size_t train_begin = 0, train_end = 0;
    std::size_t test_begin = 0, test_end = 0;
};

/// Expanding-window folds with boundaries b_i = floor(i*T/(n+1)):
/// fold i trains on [0, b_i) and tests on [b_i, b_{i+1}).
std::vector<FoldSpan> time_splits(std::size_t T, std::size_t n_splits);

/// -mean(y ln p + (1-y) ln(1-p)); p must already be clipped.
double log_loss(const std::vector<int>& y, const std::vector<double>& p);

/// Rank-based AUC with ties counted half; absent when either class
/// is empty.
std::optional<double> auc(const std::vector<int>& y, const std::vector<double>& p);

struct ConditionalStats {
    double theta_c = 0.0;
    double covariance = 0.0;
    std::optional<double> correlation;
    std::size_t n = 0;
};

/// High-risk conditioning: restrict to p_c > quantile(p_c, theta)
/// and report the sample covariance/correlation of (p_r, p_c) there.
/// Correlation is absent for n < 3 or a constant restricted series.
ConditionalStats conditional_high_risk_corr(const std::vector<double>& p_c,
                                            const std::vector<double>& p_r,
                                            double theta_quantile);

struct EvalConfig {
    std::vector<std::size_t> splits_list = {2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<std::int64_t> deltas = {300, 600};          // seconds
    std::vector<std::int64_t> windows = {300, 600, 900, 1200}; // seconds
    std::vector<ModelKind> models = {ModelKind::LOGISTIC, ModelKind::FOREST,
                                     ModelKind::BOOSTED};
    double theta_quantile = 0.90;
    std::uint64_t seed = 0;
    bool class_weighting = true;
};

struct FoldMetrics {
    std::size_t fold = 0; // 1-based
    double risk = 0.0;
    std::optional<double> auc;
    double baseline_risk = 0.0;
    bool degenerate = false;
    std::size_t n_train = 0, n_test = 0, n_test_pos = 0;
};

struct CellKey {
    std::string representation;
    std::string model;
    std::size_t n_splits = 0;
    std::int64_t delta = 0;
    std::int64_t window = 0;

    bool operator<(const CellKey& other) const;
};

struct CellMetrics {
    CellKey key;
    std::vector<FoldMetrics> folds;
    double risk = 0.0;          // mean over folds
    std::optional<double> auc;  // mean over folds where defined
    double baseline_risk = 0.0; // mean over folds
};

/// Residual-minus-canonical risk gap for one configuration.
struct GapCell {
    std::string model;
    std::size_t n_splits = 0;
    std::int64_t delta = 0;
    std::int64_t window = 0;
    double delta_gap = 0.0;
    std::vector<double> per_fold_gap;
};

struct ConditionalCell {
    std::string model;
    std::size_t n_splits = 0;
    std::int64_t delta = 0;
    std::int64_t window = 0;
    std::vector<ConditionalStats> per_fold;
    double mean_covariance = 0.0;
    std::optional<double> mean_correlation; // over folds where defined
};

/// Pooled per-fold risk difference of one representation against
/// canonical, with a two-sided sign-test p-value.
struct PairedDiff {
    std::string representation;
    double mean_diff = 0.0;
    std::size_t n_folds = 0;
    std::size_t n_positive = 0;
    double sign_test_p = 1.0;
};

struct RiskReport {
    std::vector<CellMetrics> cells;          // sorted by key
    std::vector<GapCell> gaps;
    std::vector<ConditionalCell> conditional;
    std::vector<PairedDiff> paired;
    std::vector<std::string> representations;
    double theta_quantile = 0.9;
    std::uint64_t seed = 0;
    bool class_weighting = true;
    std::size_t faults_out_of_range = 0;
    std::vector<std::string> warnings;
};

/// One feature space entering the evaluation. With pca set, the
/// matrix is replaced per fold by a train-fitted PCA projection to
/// pca_components dimensions.
struct RepresentationInput {
    std::string name;
    const MetricFrame* frame = nullptr;
    bool pca = false;
    std::size_t pca_components = 0;
};

/// Shared sweep engine: identical splits, labels, and model seeds
/// across representations; cells keyed and sorted deterministically.
RiskReport evaluate_representations(const std::vector<RepresentationInput>& reps,
                                    const FaultLog& faults, const EvalConfig& config);

/// Canonical-vs-residual decomposition (two representations plus the
/// gap and conditional-correlation sections).
RiskReport evaluate_decomposition(const TransformedFrame& canonical,
                                  const TransformedFrame& residual,
                                  const FaultLog& faults, const EvalConfig& config);

/// Two-sided exact binomial sign test for k successes in n fair
/// trials.
double sign_test_two_sided(std::size_t k, std::size_t n);

} // namespace semseg
