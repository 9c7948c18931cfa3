// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace semseg {

enum class ModelKind { LOGISTIC, FOREST, BOOSTED };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Hyperparameters for the three in-repo model classes. Fields apply
/// per kind: learning_rate/iterations/l2 to LOGISTIC,
/// n_trees/max_depth/feature_fraction to FOREST, and
/// learning_rate/n_trees/max_depth/feature_fraction to BOOSTED.
struct ModelSpec {
    ModelKind kind = ModelKind::LOGISTIC;
    double learning_rate = 0.5;
    std::size_t iterations = 300;
    double l2 = 1e-4;
    std::size_t n_trees = 60;
    std::size_t max_depth = 5;
    double feature_fraction = 0.7;
    std::uint64_t seed = 0;
    bool class_weighting = true;

    /// Tuned per-kind defaults.
    static ModelSpec defaults(ModelKind kind, std::uint64_t seed = 0);
};

struct FitResult {
    std::vector<double> probabilities; // one per test row, clipped
    bool degenerate = false;           // single-class training fold
};

/// Clip to [1e-6, 1 - 1e-6] so log-loss stays finite.
double clip_probability(double p);

/// Trains the specified model on (X_train, y_train) and returns
/// clipped probabilities for X_test. Deterministic given the seed. A
/// single-class training fold yields a constant clipped base-rate
/// prediction with the degenerate flag set.
FitResult fit_predict(const ModelSpec& spec,
                      const std::vector<std::vector<double>>& X_train,
                      const std::vector<int>& y_train,
                      const std::vector<std::vector<double>>& X_test);

} // namespace semseg
