// SPDX-License-Identifier: Apache-2.0
#include "semseg/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semseg/errors.hpp"
#include "semseg/rng.hpp"

namespace semseg {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::LOGISTIC: return "logistic";
        case ModelKind::FOREST: return "forest";
        case ModelKind::BOOSTED: return "boosted";
    }
    throw ConfigError("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "logistic") return ModelKind::LOGISTIC;
    if (name == "forest") return ModelKind::FOREST;
    if (name == "boosted") return ModelKind::BOOSTED;
    throw ConfigError("unknown model " + name);
}

ModelSpec ModelSpec::defaults(ModelKind kind, std::uint64_t seed) {
    ModelSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    switch (kind) {
        case ModelKind::LOGISTIC:
            // learning_rate * 2 * l2 must stay well below 1 or the ridge
            // term makes full-batch gradient descent oscillate.
            spec.learning_rate = 0.1;
            spec.iterations = 600;
            spec.l2 = 2.0;
            break;
        case ModelKind::FOREST:
            spec.n_trees = 60;
            spec.max_depth = 5;
            spec.feature_fraction = 0.7;
            break;
        case ModelKind::BOOSTED:
            spec.learning_rate = 0.08;
            spec.n_trees = 80;
            spec.max_depth = 2;
            spec.feature_fraction = 0.8;
            break;
    }
    return spec;
}

double clip_probability(double p) { return std::clamp(p, 1e-6, 1.0 - 1e-6); }

namespace {

using Matrix = std::vector<std::vector<double>>;

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_matrix(const Matrix& X, std::size_t d, const char* which) {
    for (const auto& row : X) {
        if (row.size() != d)
            throw DataError(std::string("fit_predict: ragged ") + which + " matrix");
        for (double v : row)
            if (!std::isfinite(v))
                throw DataError(std::string("fit_predict: non-finite value in ") + which);
    }
}

std::vector<double> class_weights(const std::vector<int>& y, bool enabled) {
    const double n = static_cast<double>(y.size());
    const double n_pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double n_neg = n - n_pos;
    const double w_pos = enabled ? n / (2.0 * n_pos) : 1.0;
    const double w_neg = enabled ? n / (2.0 * n_neg) : 1.0;
    std::vector<double> w(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) w[i] = y[i] == 1 ? w_pos : w_neg;
    return w;
}

// Inverse-frequency weighting shifts the optimum of the training loss so
// that an uninformative fit converges to probability 0.5 instead of the
// class prior. Reported probabilities subtract ln(w_pos/w_neg) in logit
// space (case-control intercept correction) so that they stay calibrated
// against the unweighted log-loss used for evaluation.
double prior_correction(const std::vector<int>& y, bool enabled) {
    if (!enabled) return 0.0;
    const double n_pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double n_neg = static_cast<double>(y.size()) - n_pos;
    return std::log(n_neg / n_pos);
}

/// Seeded subset of ceil(fraction * d) feature indices, ascending.
std::vector<std::size_t> feature_subset(std::size_t d, double fraction, Rng& rng) {
    const auto m = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(d))));
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), std::size_t{0});
    for (std::size_t i = 0; i < std::min(m, d); ++i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(i),
                            static_cast<std::int64_t>(d) - 1));
        std::swap(all[i], all[j]);
    }
    all.resize(std::min(m, d));
    std::sort(all.begin(), all.end());
    return all;
}

std::vector<double> fit_logistic(const ModelSpec& spec, const Matrix& X,
                                 const std::vector<int>& y, const Matrix& X_test) {
    const std::size_t n = X.size();
    const std::size_t d = X[0].size();

    // Standardize with training statistics; constant features carry
    // no information and are zeroed out.
    std::vector<double> mu(d, 0.0), sd(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += X[i][j];
        mu[j] = acc / static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = X[i][j] - mu[j];
            var += dx * dx;
        }
        sd[j] = std::sqrt(var / static_cast<double>(n));
    }
    const auto standardized = [&](const Matrix& src) {
        Matrix out(src.size(), std::vector<double>(d));
        for (std::size_t i = 0; i < src.size(); ++i)
            for (std::size_t j = 0; j < d; ++j)
                out[i][j] = sd[j] > 1e-12 ? (src[i][j] - mu[j]) / sd[j] : 0.0;
        return out;
    };
    const Matrix Z = standardized(X);
    const Matrix Z_test = standardized(X_test);

    const auto w = class_weights(y, spec.class_weighting);
    const double w_total = std::accumulate(w.begin(), w.end(), 0.0);

    std::vector<double> beta(d, 0.0);
    double intercept = 0.0;
    std::vector<double> grad(d);
    for (std::size_t it = 0; it < spec.iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad0 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = intercept;
            for (std::size_t j = 0; j < d; ++j) z += beta[j] * Z[i][j];
            const double err = w[i] * (sigmoid(z) - static_cast<double>(y[i]));
            grad0 += err;
            for (std::size_t j = 0; j < d; ++j) grad[j] += err * Z[i][j];
        }
        intercept -= spec.learning_rate * grad0 / w_total;
        for (std::size_t j = 0; j < d; ++j)
            beta[j] -= spec.learning_rate * (grad[j] / w_total + 2.0 * spec.l2 * beta[j]);
    }

    const double shift = prior_correction(y, spec.class_weighting);
    std::vector<double> probs(X_test.size());
    for (std::size_t i = 0; i < X_test.size(); ++i) {
        double z = intercept - shift;
        for (std::size_t j = 0; j < d; ++j) z += beta[j] * Z_test[i][j];
        probs[i] = clip_probability(sigmoid(z));
    }
    return probs;
}

/// Flat binary tree over row indices; nodes split on (feature,
/// threshold) chosen greedily, first-found wins on tied scores.
struct TreeNode {
    bool leaf = true;
    double value = 0.0; // leaf payload (probability or boost step)
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0, right = 0;
};

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = 0.0; // lower is better
};

// min_child bounds the smaller side of every split; large values stop the
// tree from carving out tiny row groups that match the training labels by
// chance.
template <typename ScoreFn>
SplitChoice best_split(const Matrix& X, const std::vector<std::size_t>& rows,
                       const std::vector<std::size_t>& features,
                       std::size_t min_child, ScoreFn&& score_fn) {
    SplitChoice best;
    if (rows.size() < 2 * min_child) return best;
    std::vector<std::pair<double, std::size_t>> order(rows.size());
    for (std::size_t f : features) {
        for (std::size_t k = 0; k < rows.size(); ++k)
            order[k] = {X[rows[k]][f], rows[k]};
        std::sort(order.begin(), order.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = min_child - 1; k + min_child < order.size(); ++k) {
            if (order[k].first == order[k + 1].first) continue;
            const double score = score_fn(order, k);
            if (!best.found || score < best.score) {
                best.found = true;
                best.feature = f;
                best.threshold = 0.5 * (order[k].first + order[k + 1].first);
                best.score = score;
            }
        }
    }
    return best;
}

class TreeBuilder {
public:
    std::vector<TreeNode> nodes;

    template <typename LeafFn, typename SplitFn>
    std::size_t build(const Matrix& X, std::vector<std::size_t> rows,
                      std::size_t depth, std::size_t max_depth, LeafFn&& leaf_value,
                      SplitFn&& find_split) {
        const std::size_t id = nodes.size();
        nodes.push_back({});
        if (depth < max_depth && rows.size() >= 2) {
            const SplitChoice split = find_split(rows);
            if (split.found) {
                std::vector<std::size_t> left_rows, right_rows;
                for (std::size_t r : rows) {
                    (X[r][split.feature] < split.threshold ? left_rows : right_rows)
                        .push_back(r);
                }
                if (!left_rows.empty() && !right_rows.empty()) {
                    nodes[id].leaf = false;
                    nodes[id].feature = split.feature;
                    nodes[id].threshold = split.threshold;
                    const std::size_t l =
                        build(X, std::move(left_rows), depth + 1, max_depth,
                              leaf_value, find_split);
                    nodes[id].left = l;
                    const std::size_t r =
                        build(X, std::move(right_rows), depth + 1, max_depth,
                              leaf_value, find_split);
                    nodes[id].right = r;
                    return id;
                }
            }
        }
        nodes[id].value = leaf_value(rows);
        return id;
    }

    double predict(const std::vector<double>& row) const {
        return nodes[leaf_index(row)].value;
    }

    std::size_t leaf_index(const std::vector<double>& row) const {
        std::size_t id = 0;
        while (!nodes[id].leaf)
            id = row[nodes[id].feature] < nodes[id].threshold ? nodes[id].left
                                                              : nodes[id].right;
        return id;
    }
};

std::vector<double> fit_forest(const ModelSpec& spec, const Matrix& X,
                               const std::vector<int>& y, const Matrix& X_test) {
    const std::size_t n = X.size();
    const std::size_t d = X[0].size();
    const auto w = class_weights(y, spec.class_weighting);
    const double base_rate =
        static_cast<double>(std::count(y.begin(), y.end(), 1)) /
        static_cast<double>(n);

    std::vector<double> sum_probs(X_test.size(), 0.0);
    Rng root(spec.seed);
    for (std::size_t t = 0; t < spec.n_trees; ++t) {
        Rng rng = root.fork(t);
        // Honest trees: one bootstrap half chooses the splits, the other
        // half estimates the leaf frequencies. Split selection chases
        // label structure, so frequencies measured on the same rows would
        // be biased toward purity; frequencies from held-out rows are
        // unbiased estimates of the leaf's true rate.
        std::vector<std::size_t> structure(n / 2 + n % 2), estimation(n / 2);
        for (auto& r : structure)
            r = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        for (auto& r : estimation)
            r = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        const auto features = feature_subset(d, spec.feature_fraction, rng);

        const auto leaf_value = [&](const std::vector<std::size_t>&) {
            return base_rate; // placeholder; honest values are filled below
        };
        const std::size_t min_child = std::max<std::size_t>(2, structure.size() / 20);
        const auto find_split = [&](const std::vector<std::size_t>& node_rows) {
            double wy_all = 0.0, wt_all = 0.0;
            for (std::size_t r : node_rows) {
                wy_all += w[r] * static_cast<double>(y[r]);
                wt_all += w[r];
            }
            // Weighted Gini of the two children after a boundary.
            return best_split(
                X, node_rows, features, min_child,
                [&](const std::vector<std::pair<double, std::size_t>>& order,
                    std::size_t boundary) {
                    double wy_l = 0.0, wt_l = 0.0;
                    for (std::size_t k = 0; k <= boundary; ++k) {
                        const std::size_t r = order[k].second;
                        wy_l += w[r] * static_cast<double>(y[r]);
                        wt_l += w[r];
                    }
                    const double wy_r = wy_all - wy_l;
                    const double wt_r = wt_all - wt_l;
                    const auto gini = [](double wy_c, double wt_c) {
                        const double p = wy_c / wt_c;
                        return 2.0 * p * (1.0 - p);
                    };
                    return (wt_l * gini(wy_l, wt_l) + wt_r * gini(wy_r, wt_r)) / wt_all;
                });
        };

        TreeBuilder tree;
        tree.build(X, std::move(structure), 0, spec.max_depth, leaf_value, find_split);

        // Plain class frequency of the estimation rows per leaf; weights only
        // steer split selection. m-estimate smoothing toward the training
        // rate keeps sparse leaves from emitting extreme frequencies.
        std::vector<double> leaf_pos(tree.nodes.size(), 0.0);
        std::vector<double> leaf_cnt(tree.nodes.size(), 0.0);
        for (std::size_t r : estimation) {
            const std::size_t leaf = tree.leaf_index(X[r]);
            leaf_pos[leaf] += static_cast<double>(y[r]);
            leaf_cnt[leaf] += 1.0;
        }
        for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
            if (!tree.nodes[id].leaf) continue;
            tree.nodes[id].value =
                (leaf_pos[id] + 4.0 * base_rate) / (leaf_cnt[id] + 4.0);
        }

        for (std::size_t i = 0; i < X_test.size(); ++i)
            sum_probs[i] += tree.predict(X_test[i]);
    }

    std::vector<double> probs(X_test.size());
    for (std::size_t i = 0; i < X_test.size(); ++i)
        probs[i] = clip_probability(sum_probs[i] / static_cast<double>(spec.n_trees));
    return probs;
}

// One boosting run over the first n_fit rows. Calls on_round(round) after
// each round; boosting stops when on_round returns false. Trees are scored
// into f_extra for the rows of X_extra (holdout or test).
template <typename OnRound>
void boost_rounds(const ModelSpec& spec, const Matrix& X,
                  const std::vector<int>& y, std::size_t n_fit,
                  const std::vector<double>& w, double f0,
                  std::vector<double>& f_fit, const Matrix& X_extra,
                  std::vector<double>& f_extra, OnRound&& on_round) {
    const std::size_t d = X[0].size();
    // Leaf shrinkage: noise leaves see inconsistent gradients across
    // rounds and stay near the prior; consistent signal accumulates.
    const double lambda = 12.0;
    const std::size_t min_child = std::max<std::size_t>(2, n_fit / 20);

    f_fit.assign(n_fit, f0);
    f_extra.assign(X_extra.size(), f0);
    std::vector<double> grad(n_fit), hess(n_fit);

    Rng root(spec.seed);
    for (std::size_t round = 0; round < spec.n_trees; ++round) {
        Rng rng = root.fork(round);
        const auto features = feature_subset(d, spec.feature_fraction, rng);
        for (std::size_t i = 0; i < n_fit; ++i) {
            const double p = sigmoid(f_fit[i]);
            grad[i] = w[i] * (p - static_cast<double>(y[i]));
            hess[i] = w[i] * p * (1.0 - p);
        }

        std::vector<std::size_t> all_rows(n_fit);
        std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

        const auto leaf_value = [&](const std::vector<std::size_t>& rows) {
            double g = 0.0, h = 0.0;
            for (std::size_t r : rows) {
                g += grad[r];
                h += hess[r];
            }
            return -g / (h + lambda);
        };
        const auto find_split = [&](const std::vector<std::size_t>& rows) {
            double g_all = 0.0, h_all = 0.0;
            for (std::size_t r : rows) {
                g_all += grad[r];
                h_all += hess[r];
            }
            const double parent_obj = g_all * g_all / (h_all + lambda);
            SplitChoice choice = best_split(
                X, rows, features, min_child,
                [&](const std::vector<std::pair<double, std::size_t>>& order,
                    std::size_t boundary) {
                    double g_l = 0.0, h_l = 0.0;
                    for (std::size_t k = 0; k <= boundary; ++k) {
                        g_l += grad[order[k].second];
                        h_l += hess[order[k].second];
                    }
                    const double g_r = g_all - g_l;
                    const double h_r = h_all - h_l;
                    // Negated Newton gain so lower score = better.
                    return -(g_l * g_l / (h_l + lambda) + g_r * g_r / (h_r + lambda) -
                             parent_obj);
                });
            if (choice.found && choice.score >= -1e-12) choice.found = false;
            return choice;
        };

        TreeBuilder tree;
        tree.build(X, std::move(all_rows), 0, spec.max_depth, leaf_value, find_split);
        for (std::size_t i = 0; i < n_fit; ++i)
            f_fit[i] += spec.learning_rate * tree.predict(X[i]);
        for (std::size_t i = 0; i < X_extra.size(); ++i)
            f_extra[i] += spec.learning_rate * tree.predict(X_extra[i]);

        if (!on_round(round)) break;
    }
}

std::vector<double> fit_boosted(const ModelSpec& spec, const Matrix& X,
                                const std::vector<int>& y, const Matrix& X_test) {
    const std::size_t n = X.size();

    // Round count chosen by temporal-holdout early stopping: boost on the
    // earlier four fifths of the training rows, score the later fifth after
    // every round, and keep the round count with the best holdout log-loss.
    // Boosting on uninformative features stops at round zero, leaving the
    // base-rate constant; the chosen count is then refit on all rows.
    std::size_t best_rounds = spec.n_trees;
    const std::size_t n_hold =
        std::max(std::min<std::size_t>(8, n / 2), n / 5);
    const std::size_t n_fit = n - n_hold;
    const auto sub_pos = static_cast<std::size_t>(
        std::count(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_fit), 1));
    if (n_fit >= 4 && sub_pos > 0 && sub_pos < n_fit) {
        const std::vector<int> y_sub(y.begin(),
                                     y.begin() + static_cast<std::ptrdiff_t>(n_fit));
        const auto w_sub = class_weights(y_sub, spec.class_weighting);
        const double shift_sub = prior_correction(y_sub, spec.class_weighting);
        double wy = 0.0, wt = 0.0;
        for (std::size_t i = 0; i < n_fit; ++i) {
            wy += w_sub[i] * static_cast<double>(y_sub[i]);
            wt += w_sub[i];
        }
        const double p0 = std::clamp(wy / wt, 1e-6, 1.0 - 1e-6);
        const double f0 = std::log(p0 / (1.0 - p0));

        const Matrix X_hold(X.begin() + static_cast<std::ptrdiff_t>(n_fit), X.end());
        const auto holdout_loss = [&](const std::vector<double>& f_hold) {
            double acc = 0.0;
            for (std::size_t i = 0; i < X_hold.size(); ++i) {
                const double p = clip_probability(sigmoid(f_hold[i] - shift_sub));
                const double yi = static_cast<double>(y[n_fit + i]);
                acc -= yi * std::log(p) + (1.0 - yi) * std::log(1.0 - p);
            }
            return acc / static_cast<double>(X_hold.size());
        };

        std::vector<double> f_fit, f_hold(X_hold.size(), f0);
        double best_loss = holdout_loss(f_hold);
        best_rounds = 0;
        boost_rounds(spec, X, y_sub, n_fit, w_sub, f0, f_fit, X_hold, f_hold,
                     [&](std::size_t round) {
                         const double loss = holdout_loss(f_hold);
                         if (loss < best_loss) {
                             best_loss = loss;
                             best_rounds = round + 1;
                         }
                         return round + 1 < best_rounds + 5; // patience 5
                     });
        // Never settle for the bare constant: one round costs little and
        // keeps the model responsive when the holdout is too small to
        // endorse anything.
        best_rounds = std::max<std::size_t>(best_rounds, 1);
    }

    const auto w = class_weights(y, spec.class_weighting);
    const double shift = prior_correction(y, spec.class_weighting);
    double wy = 0.0, wt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        wy += w[i] * static_cast<double>(y[i]);
        wt += w[i];
    }
    const double p0 = std::clamp(wy / wt, 1e-6, 1.0 - 1e-6);
    const double f0 = std::log(p0 / (1.0 - p0));

    ModelSpec final_spec = spec;
    final_spec.n_trees = best_rounds;
    std::vector<double> f_train, f_test(X_test.size(), f0);
    boost_rounds(final_spec, X, y, n, w, f0, f_train, X_test, f_test,
                 [](std::size_t) { return true; });

    std::vector<double> probs(X_test.size());
    for (std::size_t i = 0; i < X_test.size(); ++i)
        probs[i] = clip_probability(sigmoid(f_test[i] - shift));
    return probs;
}

} // namespace

FitResult fit_predict(const ModelSpec& spec, const Matrix& X_train,
                      const std::vector<int>& y_train, const Matrix& X_test) {
    if (X_train.empty()) throw DataError("fit_predict: empty training set");
    if (X_train.size() != y_train.size())
        throw DataError("fit_predict: feature/label length mismatch");
    const std::size_t d = X_train[0].size();
    check_matrix(X_train, d, "train");
    check_matrix(X_test, d, "test");
    for (int label : y_train)
        if (label != 0 && label != 1)
            throw DataError("fit_predict: labels must be 0 or 1");

    const auto n_pos = static_cast<std::size_t>(
        std::count(y_train.begin(), y_train.end(), 1));
    if (n_pos == 0 || n_pos == y_train.size()) {
        const double rate = static_cast<double>(n_pos) /
                            static_cast<double>(y_train.size());
        FitResult result;
        result.degenerate = true;
        result.probabilities.assign(X_test.size(), clip_probability(rate));
        return result;
    }

    FitResult result;
    switch (spec.kind) {
        case ModelKind::LOGISTIC:
            result.probabilities = fit_logistic(spec, X_train, y_train, X_test);
            break;
        case ModelKind::FOREST:
            result.probabilities = fit_forest(spec, X_train, y_train, X_test);
            break;
        case ModelKind::BOOSTED:
            result.probabilities = fit_boosted(spec, X_train, y_train, X_test);
            break;
    }
    return result;
}

} // namespace semseg
