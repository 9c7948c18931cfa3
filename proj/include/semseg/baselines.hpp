// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "semseg/prediction.hpp"
#include "semseg/transforms.hpp"

namespace semseg {

struct PcaModel {
    std::vector<double> means;                    // d
    std::vector<std::vector<double>> components;  // k x d, orthonormal rows
    std::vector<double> explained_variance;       // k, non-increasing
    bool rank_deficient = false;
};

/// Top-k principal components of the sample covariance of X (rows =
/// observations). Deterministic sign convention: the entry of
/// largest magnitude in each component is positive, first index on
/// ties. Eigenvalues below rank come out as zero variance and set
/// the rank_deficient flag.
PcaModel pca_fit(const std::vector<std::vector<double>>& X, std::size_t k);

/// Projects rows onto the components after centering.
std::vector<std::vector<double>> pca_transform(
    const PcaModel& model, const std::vector<std::vector<double>>& X);

/// Maps projections back to the original space (approximate inverse
/// for k < d).
std::vector<std::vector<double>> pca_inverse_transform(
    const PcaModel& model, const std::vector<std::vector<double>>& Z);

/// Column-concatenation of two aligned transformed frames.
TransformedFrame concat_frames(const TransformedFrame& left,
                               const TransformedFrame& right);

/// Four-way evaluation: canonical, residual, full, and a per-fold
/// train-fitted PCA of the full space with k = canonical dimension.
/// `full` must be the column-concatenation of canonical and residual.
RiskReport compare_representations(const TransformedFrame& canonical,
                                   const TransformedFrame& residual,
                                   const TransformedFrame& full,
                                   const FaultLog& faults, const EvalConfig& config);

} // namespace semseg
