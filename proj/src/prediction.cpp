// SPDX-License-Identifier: Apache-2.0
#include "semseg/prediction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "semseg/baselines.hpp"
#include "semseg/errors.hpp"
#include "semseg/rng.hpp"
#include "semseg/stats.hpp"

namespace semseg {

FaultLog load_fault_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("missing header in " + path);
    if (line == "timestamp,magnitude\r") line.pop_back();
    if (line != "timestamp,magnitude")
        throw FormatError("expected header timestamp,magnitude in " + path);
    FaultLog log;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError("bad fault row in " + path + ": " + line);
        FaultEvent event;
        const std::string ts_text = line.substr(0, comma);
        auto [p, ec] = std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(),
                                       event.timestamp);
        if (ec != std::errc{} || p != ts_text.data() + ts_text.size())
            throw FormatError("bad fault timestamp in " + path + ": " + ts_text);
        try {
            event.magnitude = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw FormatError("bad fault magnitude in " + path + ": " + line);
        }
        log.events.push_back(event);
    }
    std::sort(log.events.begin(), log.events.end(),
              [](const FaultEvent& a, const FaultEvent& b) {
                  return a.timestamp < b.timestamp;
              });
    return log;
}

void write_fault_log(const FaultLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "timestamp,magnitude\n";
    for (const auto& event : log.events) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", event.magnitude);
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[32];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, event.magnitude);
            double back = 0.0;
            std::sscanf(shorter, "%lf", &back);
            if (back == event.magnitude) {
                std::snprintf(buf, sizeof(buf), "%s", shorter);
                break;
            }
        }
        out << event.timestamp << ',' << buf << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<int> label_horizon(const std::vector<std::int64_t>& timestamps,
                               const FaultLog& faults, std::int64_t delta) {
    if (delta <= 0) throw ConfigError("label_horizon: delta must be > 0");
    std::vector<std::int64_t> fault_times;
    fault_times.reserve(faults.events.size());
    for (const auto& event : faults.events) fault_times.push_back(event.timestamp);
    std::sort(fault_times.begin(), fault_times.end());

    std::vector<int> labels(timestamps.size(), 0);
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        // First fault strictly after t; positive iff it is within t + delta.
        const auto it = std::upper_bound(fault_times.begin(), fault_times.end(),
                                         timestamps[i]);
        if (it != fault_times.end() && *it <= timestamps[i] + delta) labels[i] = 1;
    }
    return labels;
}

LabeledDataset aggregate_frame(const MetricFrame& frame, const std::vector<int>& y,
                               std::int64_t window, std::int64_t delta) {
    if (frame.n_rows() == 0) throw DataError("aggregate_frame: empty frame");
    if (y.size() != frame.n_rows())
        throw DataError("aggregate_frame: label length mismatch");
    std::int64_t cadence = window;
    for (std::size_t t = 1; t < frame.n_rows(); ++t)
        cadence = std::min(cadence, frame.timestamps[t] - frame.timestamps[t - 1]);
    if (frame.n_rows() > 1 && window < cadence)
        throw ConfigError("aggregate_frame: window smaller than native cadence");

    const std::int64_t t0 = frame.timestamps.front();
    LabeledDataset out;
    out.columns = frame.columns;
    out.horizon_delta = delta;
    out.aggregation_window = window;

    std::size_t row = 0;
    while (row < frame.n_rows()) {
        const std::int64_t bin = (frame.timestamps[row] - t0) / window;
        std::size_t end = row;
        while (end < frame.n_rows() && (frame.timestamps[end] - t0) / window == bin)
            ++end;
        std::vector<double> features(frame.n_cols(), 0.0);
        int label = 0;
        for (std::size_t t = row; t < end; ++t) {
            for (std::size_t c = 0; c < frame.n_cols(); ++c)
                features[c] += frame.values[c][t];
            label = std::max(label, y[t]);
        }
        const double count = static_cast<double>(end - row);
        for (double& v : features) v /= count;
        out.X.push_back(std::move(features));
        out.y.push_back(label);
        out.timestamps.push_back(t0 + bin * window);
        row = end;
    }
    return out;
}

std::vector<FoldSpan> time_splits(std::size_t T, std::size_t n_splits) {
    if (n_splits < 2) throw ConfigError("time_splits: n_splits must be >= 2");
    if (T < (n_splits + 1) * 2)
        throw InsufficientDataError("time_splits: T too small for n_splits");
    std::vector<FoldSpan> folds;
    folds.reserve(n_splits);
    for (std::size_t i = 1; i <= n_splits; ++i) {
        FoldSpan fold;
        fold.train_begin = 0;
        fold.train_end = i * T / (n_splits + 1);
        fold.test_begin = fold.train_end;
        fold.test_end = (i + 1) * T / (n_splits + 1);
        folds.push_back(fold);
    }
    return folds;
}

double log_loss(const std::vector<int>& y, const std::vector<double>& p) {
    if (y.size() != p.size()) throw DataError("log_loss: length mismatch");
    if (y.empty()) throw DataError("log_loss: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        acc += y[i] == 1 ? -std::log(p[i]) : -std::log(1.0 - p[i]);
    return acc / static_cast<double>(y.size());
}

std::optional<double> auc(const std::vector<int>& y, const std::vector<double>& p) {
    if (y.size() != p.size()) throw DataError("auc: length mismatch");
    const auto n_pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    const std::size_t n_neg = y.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;
    const auto ranks = mid_ranks(p);
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == 1) rank_sum += ranks[i];
    const double dpos = static_cast<double>(n_pos);
    return (rank_sum - dpos * (dpos + 1.0) / 2.0) /
           (dpos * static_cast<double>(n_neg));
}

ConditionalStats conditional_high_risk_corr(const std::vector<double>& p_c,
                                            const std::vector<double>& p_r,
                                            double theta_quantile) {
    if (p_c.size() != p_r.size())
        throw DataError("conditional_high_risk_corr: length mismatch");
    if (theta_quantile <= 0.0 || theta_quantile >= 1.0)
        throw ConfigError("conditional_high_risk_corr: quantile must be in (0,1)");
    ConditionalStats stats;
    if (p_c.empty()) return stats;
    stats.theta_c = quantile(p_c, theta_quantile);

    std::vector<double> sel_c, sel_r;
    for (std::size_t i = 0; i < p_c.size(); ++i) {
        if (p_c[i] > stats.theta_c) {
            sel_c.push_back(p_c[i]);
            sel_r.push_back(p_r[i]);
        }
    }
    stats.n = sel_c.size();
    if (stats.n < 2) return stats;

    const double mc = mean(sel_c);
    const double mr = mean(sel_r);
    double sxy = 0.0;
    for (std::size_t i = 0; i < sel_c.size(); ++i)
        sxy += (sel_r[i] - mr) * (sel_c[i] - mc);
    stats.covariance = sxy / static_cast<double>(stats.n - 1);
    if (stats.n >= 3) {
        try {
            stats.correlation = pearson(sel_r, sel_c);
        } catch (const UndefinedCorrelationError&) {
            // Constant restricted series: correlation stays absent.
        }
    }
    return stats;
}

double sign_test_two_sided(std::size_t k, std::size_t n) {
    if (n == 0) return 1.0;
    const double dn = static_cast<double>(n);
    const auto log_binom_pmf = [&](std::size_t i) {
        return std::lgamma(dn + 1.0) - std::lgamma(static_cast<double>(i) + 1.0) -
               std::lgamma(dn - static_cast<double>(i) + 1.0) - dn * std::log(2.0);
    };
    double lower = 0.0, upper = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double pmf = std::exp(log_binom_pmf(i));
        if (i <= k) lower += pmf;
        if (i >= k) upper += pmf;
    }
    return std::min(1.0, 2.0 * std::min(lower, upper));
}

bool CellKey::operator<(const CellKey& other) const {
    return std::tie(representation, model, n_splits, delta, window) <
           std::tie(other.representation, other.model, other.n_splits, other.delta,
                    other.window);
}

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix slice_rows(const Matrix& X, std::size_t begin, std::size_t end) {
    return Matrix(X.begin() + static_cast<std::ptrdiff_t>(begin),
                  X.begin() + static_cast<std::ptrdiff_t>(end));
}

double constant_baseline_risk(const std::vector<int>& y_train,
                              const std::vector<int>& y_test) {
    const double rate = static_cast<double>(
                            std::count(y_train.begin(), y_train.end(), 1)) /
                        static_cast<double>(y_train.size());
    const std::vector<double> p(y_test.size(), clip_probability(rate));
    return log_loss(y_test, p);
}

std::optional<double> mean_of_defined(const std::vector<std::optional<double>>& xs) {
    std::vector<double> defined;
    for (const auto& x : xs)
        if (x) defined.push_back(*x);
    if (defined.empty()) return std::nullopt;
    return mean(defined);
}

} // namespace

RiskReport evaluate_representations(const std::vector<RepresentationInput>& reps,
                                    const FaultLog& faults, const EvalConfig& config) {
    if (reps.empty()) throw ConfigError("evaluate_representations: no representations");
    for (const auto& rep : reps) {
        if (rep.frame == nullptr)
            throw ConfigError("evaluate_representations: null frame for " + rep.name);
        if (rep.frame->timestamps != reps[0].frame->timestamps)
            throw DataError("evaluate_representations: representations must share timestamps");
        if (rep.pca && rep.pca_components == 0)
            throw ConfigError("evaluate_representations: PCA needs components >= 1");
    }
    if (config.splits_list.empty() || config.deltas.empty() ||
        config.windows.empty() || config.models.empty())
        throw ConfigError("evaluate_representations: empty sweep axis");

    RiskReport report;
    report.theta_quantile = config.theta_quantile;
    report.seed = config.seed;
    report.class_weighting = config.class_weighting;
    for (const auto& rep : reps) report.representations.push_back(rep.name);

    const auto& native_ts = reps[0].frame->timestamps;
    if (faults.events.empty())
        report.warnings.push_back("empty fault log: all labels are zero");
    const std::int64_t max_delta =
        *std::max_element(config.deltas.begin(), config.deltas.end());
    for (const auto& event : faults.events)
        if (event.timestamp < native_ts.front() ||
            event.timestamp > native_ts.back() + max_delta)
            ++report.faults_out_of_range;
    if (report.faults_out_of_range > 0)
        report.warnings.push_back("fault events outside the frame range: " +
                                  std::to_string(report.faults_out_of_range));

    const bool has_canonical =
        std::any_of(reps.begin(), reps.end(),
                    [](const auto& r) { return r.name == "canonical"; });
    const bool has_residual =
        std::any_of(reps.begin(), reps.end(),
                    [](const auto& r) { return r.name == "residual"; });

    std::map<CellKey, CellMetrics> cells;
    std::map<std::string, std::vector<std::pair<double, double>>> paired_diffs;

    for (std::size_t w_idx = 0; w_idx < config.windows.size(); ++w_idx) {
        const std::int64_t window = config.windows[w_idx];
        // Feature bins depend only on the window; compute once per rep.
        std::vector<LabeledDataset> agg(reps.size());
        const std::vector<int> zero_labels(native_ts.size(), 0);
        for (std::size_t r = 0; r < reps.size(); ++r)
            agg[r] = aggregate_frame(*reps[r].frame, zero_labels, window);

        for (std::size_t d_idx = 0; d_idx < config.deltas.size(); ++d_idx) {
            const std::int64_t delta = config.deltas[d_idx];
            const std::vector<int> native_labels =
                label_horizon(native_ts, faults, delta);
            const LabeledDataset labeled =
                aggregate_frame(*reps[0].frame, native_labels, window, delta);
            const std::vector<int>& y = labeled.y;
            const std::size_t n_bins = y.size();

            for (std::size_t s_idx = 0; s_idx < config.splits_list.size(); ++s_idx) {
                const std::size_t n_splits = config.splits_list[s_idx];
                std::vector<FoldSpan> folds;
                try {
                    folds = time_splits(n_bins, n_splits);
                } catch (const InsufficientDataError& e) {
                    report.warnings.push_back(
                        "skipped splits=" + std::to_string(n_splits) + " window=" +
                        std::to_string(window) + ": " + e.what());
                    continue;
                }

                // fold -> rep -> model -> probabilities over the test rows
                std::vector<std::vector<std::vector<std::vector<double>>>> probs(
                    folds.size(),
                    std::vector<std::vector<std::vector<double>>>(
                        reps.size(),
                        std::vector<std::vector<double>>(config.models.size())));
                std::vector<std::vector<std::vector<FoldMetrics>>> metrics(
                    folds.size(),
                    std::vector<std::vector<FoldMetrics>>(
                        reps.size(), std::vector<FoldMetrics>(config.models.size())));

                for (std::size_t f = 0; f < folds.size(); ++f) {
                    const FoldSpan& fold = folds[f];
                    if (fold.test_begin == fold.test_end) {
                        report.warnings.push_back(
                            "skipped empty test fold " + std::to_string(f + 1) +
                            " at splits=" + std::to_string(n_splits));
                        continue;
                    }
                    const std::vector<int> y_train(
                        y.begin(), y.begin() + static_cast<std::ptrdiff_t>(fold.train_end));
                    const std::vector<int> y_test(
                        y.begin() + static_cast<std::ptrdiff_t>(fold.test_begin),
                        y.begin() + static_cast<std::ptrdiff_t>(fold.test_end));

                    for (std::size_t r = 0; r < reps.size(); ++r) {
                        Matrix X_train = slice_rows(agg[r].X, 0, fold.train_end);
                        Matrix X_test =
                            slice_rows(agg[r].X, fold.test_begin, fold.test_end);
                        if (reps[r].pca) {
                            const std::size_t k = std::min(
                                reps[r].pca_components,
                                std::min(X_train.size() > 1 ? X_train.size() - 1
                                                            : std::size_t{1},
                                         X_train[0].size()));
                            const PcaModel pca = pca_fit(X_train, k);
                            X_train = pca_transform(pca, X_train);
                            X_test = pca_transform(pca, X_test);
                        }

                        for (std::size_t m = 0; m < config.models.size(); ++m) {
                            const std::uint64_t model_seed = Rng(config.seed)
                                                                 .fork(w_idx)
                                                                 .fork(d_idx)
                                                                 .fork(n_splits)
                                                                 .fork(m)
                                                                 .fork(f)
                                                                 .next_u64();
                            ModelSpec spec =
                                ModelSpec::defaults(config.models[m], model_seed);
                            spec.class_weighting = config.class_weighting;
                            const FitResult fit =
                                fit_predict(spec, X_train, y_train, X_test);

                            FoldMetrics fm;
                            fm.fold = f + 1;
                            fm.risk = log_loss(y_test, fit.probabilities);
                            fm.auc = auc(y_test, fit.probabilities);
                            fm.baseline_risk = constant_baseline_risk(y_train, y_test);
                            fm.degenerate = fit.degenerate;
                            fm.n_train = y_train.size();
                            fm.n_test = y_test.size();
                            fm.n_test_pos = static_cast<std::size_t>(
                                std::count(y_test.begin(), y_test.end(), 1));
                            metrics[f][r][m] = fm;
                            probs[f][r][m] = fit.probabilities;
                        }
                    }
                }

                for (std::size_t m = 0; m < config.models.size(); ++m) {
                    const std::string model_name = to_string(config.models[m]);
                    std::size_t canonical_idx = reps.size(), residual_idx = reps.size();
                    for (std::size_t r = 0; r < reps.size(); ++r) {
                        CellKey key{reps[r].name, model_name, n_splits, delta, window};
                        CellMetrics cell;
                        cell.key = key;
                        std::vector<double> risks, baselines;
                        std::vector<std::optional<double>> aucs;
                        for (std::size_t f = 0; f < folds.size(); ++f) {
                            cell.folds.push_back(metrics[f][r][m]);
                            risks.push_back(metrics[f][r][m].risk);
                            baselines.push_back(metrics[f][r][m].baseline_risk);
                            aucs.push_back(metrics[f][r][m].auc);
                        }
                        cell.risk = mean(risks);
                        cell.baseline_risk = mean(baselines);
                        cell.auc = mean_of_defined(aucs);
                        cells.emplace(key, std::move(cell));
                        if (reps[r].name == "canonical") canonical_idx = r;
                        if (reps[r].name == "residual") residual_idx = r;
                    }

                    if (has_canonical && canonical_idx < reps.size()) {
                        for (std::size_t r = 0; r < reps.size(); ++r) {
                            if (r == canonical_idx) continue;
                            for (std::size_t f = 0; f < folds.size(); ++f)
                                paired_diffs[reps[r].name].emplace_back(
                                    metrics[f][r][m].risk,
                                    metrics[f][canonical_idx][m].risk);
                        }
                    }
                    if (has_canonical && has_residual) {
                        GapCell gap{model_name, n_splits, delta, window, 0.0, {}};
                        ConditionalCell cond{model_name, n_splits, delta,
                                             window,     {},       0.0,
                                             std::nullopt};
                        std::vector<double> covs;
                        std::vector<std::optional<double>> corrs;
                        for (std::size_t f = 0; f < folds.size(); ++f) {
                            gap.per_fold_gap.push_back(
                                metrics[f][residual_idx][m].risk -
                                metrics[f][canonical_idx][m].risk);
                            const ConditionalStats stats = conditional_high_risk_corr(
                                probs[f][canonical_idx][m], probs[f][residual_idx][m],
                                config.theta_quantile);
                            covs.push_back(stats.covariance);
                            corrs.push_back(stats.correlation);
                            cond.per_fold.push_back(stats);
                        }
                        gap.delta_gap = mean(gap.per_fold_gap);
                        cond.mean_covariance = mean(covs);
                        cond.mean_correlation = mean_of_defined(corrs);
                        report.gaps.push_back(std::move(gap));
                        report.conditional.push_back(std::move(cond));
                    }
                }
            }
        }
    }

    for (auto& [key, cell] : cells) report.cells.push_back(std::move(cell));
    for (const auto& rep : reps) {
        const auto it = paired_diffs.find(rep.name);
        if (it == paired_diffs.end()) continue;
        PairedDiff paired;
        paired.representation = rep.name;
        paired.n_folds = it->second.size();
        double acc = 0.0;
        std::size_t positive = 0, nonzero = 0;
        for (const auto& [other, canonical] : it->second) {
            const double diff = other - canonical;
            acc += diff;
            if (diff > 0.0) ++positive;
            if (diff != 0.0) ++nonzero;
        }
        paired.mean_diff = acc / static_cast<double>(it->second.size());
        paired.n_positive = positive;
        paired.sign_test_p = sign_test_two_sided(positive, nonzero);
        report.paired.push_back(std::move(paired));
    }
    return report;
}

RiskReport evaluate_decomposition(const TransformedFrame& canonical,
                                  const TransformedFrame& residual,
                                  const FaultLog& faults, const EvalConfig& config) {
    const std::vector<RepresentationInput> reps = {
        {"canonical", &canonical.frame, false, 0},
        {"residual", &residual.frame, false, 0},
    };
    return evaluate_representations(reps, faults, config);
}

} // namespace semseg
