// SPDX-License-Identifier: Apache-2.0
#include "semseg/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "semseg/errors.hpp"
#include "semseg/stats.hpp"

namespace semseg {

std::vector<double> transform_mcr(const std::vector<double>& series) {
    if (series.size() < 2)
        throw InsufficientDataError("mcr: need at least two samples");
    std::vector<double> out(series.size() - 1);
    for (std::size_t t = 1; t < series.size(); ++t)
        out[t - 1] = std::max(0.0, series[t] - series[t - 1]);
    return out;
}

std::vector<double> transform_ltc(const std::vector<double>& series) {
    std::vector<double> out(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        if (series[t] < 0.0)
            throw DataError("ltc: negative value at index " + std::to_string(t));
        out[t] = std::log1p(series[t]);
    }
    return out;
}

std::vector<double> transform_bsr(const std::vector<double>& series,
                                  const RollingBaseline& baseline) {
    if (baseline.window_w < 2) throw ConfigError("bsr: window must be >= 2");
    if (baseline.epsilon < 0.0) throw ConfigError("bsr: epsilon must be >= 0");
    if (series.size() < baseline.window_w)
        throw InsufficientDataError("bsr: series shorter than window");
    const auto medians = rolling_median(series, baseline.window_w);
    std::vector<double> out;
    out.reserve(series.size() - baseline.window_w + 1);
    for (std::size_t t = baseline.window_w - 1; t < series.size(); ++t)
        out.push_back(series[t] / (medians[t] + baseline.epsilon));
    return out;
}

std::vector<double> transform_network_rate(
    const std::vector<double>& series, const std::vector<std::int64_t>& timestamps) {
    if (series.size() < 2)
        throw InsufficientDataError("network_rate: need at least two samples");
    if (series.size() != timestamps.size())
        throw DataError("network_rate: series/timestamp length mismatch");
    std::vector<double> out(series.size() - 1);
    for (std::size_t t = 1; t < series.size(); ++t) {
        const auto dt = timestamps[t] - timestamps[t - 1];
        if (dt <= 0) throw DataError("network_rate: timestamps not increasing");
        out[t - 1] = std::max(0.0, series[t] - series[t - 1]) / static_cast<double>(dt);
    }
    return out;
}

std::vector<double> transform_gbd(const std::vector<double>& series, double epsilon) {
    if (series.empty()) throw InsufficientDataError("gbd: empty series");
    if (epsilon < 0.0) throw ConfigError("gbd: epsilon must be >= 0");
    const double med = median(series);
    const double denom = std::abs(med) + epsilon;
    std::vector<double> out(series.size());
    for (std::size_t t = 0; t < series.size(); ++t)
        out[t] = (denom == 0.0) ? 0.0 : (series[t] - med) / denom;
    return out;
}

std::vector<double> transform_rbdr(const std::vector<double>& series,
                                   const RollingBaseline& baseline) {
    if (baseline.window_w < 2) throw ConfigError("rbdr: window must be >= 2");
    if (series.size() < baseline.window_w)
        throw InsufficientDataError("rbdr: series shorter than window");
    const auto medians = rolling_median(series, baseline.window_w);
    std::vector<double> out;
    out.reserve(series.size() - baseline.window_w + 1);
    for (std::size_t t = baseline.window_w - 1; t < series.size(); ++t)
        out.push_back((series[t] - medians[t]) / (medians[t] + baseline.epsilon));
    return out;
}

std::vector<double> robust_scale(const std::vector<double>& series,
                                 bool* degenerate_flag) {
    if (series.size() < 4)
        throw InsufficientDataError("robust_scale: need at least four samples");
    const double med = median(series);
    const double spread = iqr(series);
    const bool degenerate = spread < 1e-12;
    if (degenerate_flag) *degenerate_flag = degenerate;
    std::vector<double> out(series.size());
    for (std::size_t t = 0; t < series.size(); ++t)
        out[t] = degenerate ? series[t] - med : (series[t] - med) / spread;
    return out;
}

namespace {

std::vector<double> zscore_conditional(const std::vector<double>& series) {
    if (series.size() < 2) return series;
    const double m = mean(series);
    const double sd = std::sqrt(sample_variance(series));
    if (sd <= 1e-9) return series;
    std::vector<double> out(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) out[t] = (series[t] - m) / sd;
    return out;
}

std::vector<double> log1p_clipped(const std::vector<double>& series) {
    std::vector<double> out(series.size());
    for (std::size_t t = 0; t < series.size(); ++t)
        out[t] = std::log1p(std::max(0.0, series[t]));
    return out;
}

} // namespace

std::vector<double> transform_residual(const std::vector<double>& series,
                                       const std::string& family_id,
                                       bool* degenerate_flag) {
    if (degenerate_flag) *degenerate_flag = false;
    if (family_id == "RESID_NONE") return series;
    if (family_id == "RESID_SQRT") {
        std::vector<double> roots(series.size());
        for (std::size_t t = 0; t < series.size(); ++t) {
            if (series[t] < 0.0)
                throw DataError("resid_sqrt: negative value at index " +
                                std::to_string(t));
            roots[t] = std::sqrt(series[t]);
        }
        return zscore_conditional(roots);
    }
    if (family_id == "RESID_LOG1P") {
        std::vector<double> logs(series.size());
        for (std::size_t t = 0; t < series.size(); ++t) {
            if (series[t] < 0.0)
                throw DataError("resid_log1p: negative value at index " +
                                std::to_string(t));
            logs[t] = std::log1p(series[t]);
        }
        return robust_scale(logs, degenerate_flag);
    }
    if (family_id == "RESID_DIFF") {
        if (series.size() < 2)
            throw InsufficientDataError("resid_diff: need at least two samples");
        std::vector<double> diff(series.size() - 1);
        double peak = 0.0;
        for (std::size_t t = 1; t < series.size(); ++t) {
            diff[t - 1] = series[t] - series[t - 1];
            peak = std::max(peak, std::abs(diff[t - 1]));
        }
        if (peak > 0.0)
            for (double& v : diff) v /= peak;
        return diff;
    }
    throw ConfigError("unknown residual family transform " + family_id);
}

namespace {

std::size_t transform_warmup(const std::string& id, const RollingBaseline& baseline) {
    if (id == "MCR" || id == "NETRATE" || id == "RESID_DIFF") return 1;
    if (id == "BSR" || id == "RBDR") return baseline.window_w - 1;
    return 0;
}

std::vector<double> apply_canonical_transform(const std::string& id,
                                              const std::vector<double>& series,
                                              const std::vector<std::int64_t>& ts,
                                              const RollingBaseline& baseline) {
    if (id == "MCR") return transform_mcr(series);
    if (id == "LTC") return transform_ltc(series);
    if (id == "BSR") return transform_bsr(series, baseline);
    if (id == "NETRATE") return transform_network_rate(series, ts);
    if (id == "GBD") return transform_gbd(series, baseline.epsilon);
    if (id == "RBDR") return transform_rbdr(series, baseline);
    throw ConfigError("unknown transform " + id);
}

std::vector<double> apply_normalization(const std::string& id,
                                        const std::vector<double>& series,
                                        bool* degenerate_flag) {
    if (id == "NONE") return series;
    if (id == "ROBUST") return robust_scale(series, degenerate_flag);
    if (id == "LOG1P") return log1p_clipped(series);
    if (id == "ZSCORE_COND") return zscore_conditional(series);
    throw ConfigError("unknown normalization " + id);
}

template <typename Fn>
auto with_column_context(const std::string& column, Fn&& fn) {
    try {
        return fn();
    } catch (const InsufficientDataError& e) {
        throw InsufficientDataError("column " + column + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError("column " + column + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError("column " + column + ": " + e.what());
    }
}

} // namespace

std::pair<TransformedFrame, TransformedFrame> apply_pipeline(
    const MetricFrame& frame, const SegmentedSpace& space,
    const SegmentTaxonomy& taxonomy, const RollingBaseline& baseline) {
    const auto rule_for = [](const std::vector<SegmentRule>& rules,
                             const std::string& name) -> const SegmentRule& {
        for (const auto& rule : rules)
            if (rule.name == name) return rule;
        throw ConfigError("segment not in taxonomy: " + name);
    };

    std::size_t max_warmup = 0;
    for (const auto& [segment, features] : space.canonical) {
        if (features.empty()) continue;
        const auto& rule = rule_for(taxonomy.canonical_segments, segment);
        max_warmup = std::max(max_warmup, transform_warmup(rule.transform, baseline));
    }
    for (const auto& [family, features] : space.residual) {
        if (features.empty()) continue;
        const auto& rule = rule_for(taxonomy.residual_families, family);
        max_warmup = std::max(max_warmup, transform_warmup(rule.transform, baseline));
    }
    if (frame.n_rows() <= max_warmup)
        throw InsufficientDataError("apply_pipeline: frame shorter than warmup");

    const std::vector<std::int64_t> shared_ts(
        frame.timestamps.begin() + static_cast<std::ptrdiff_t>(max_warmup),
        frame.timestamps.end());

    const auto trim_to_shared = [&](std::vector<double> series, std::size_t warmup) {
        series.erase(series.begin(),
                     series.begin() + static_cast<std::ptrdiff_t>(max_warmup - warmup));
        return series;
    };

    TransformedFrame canonical;
    canonical.frame.timestamps = shared_ts;
    for (const auto& [segment, features] : space.canonical) {
        if (features.empty()) continue;
        const auto& rule = rule_for(taxonomy.canonical_segments, segment);
        for (const auto& feature : features) {
            auto result = with_column_context(feature, [&] {
                bool degenerate = false;
                auto series = apply_canonical_transform(
                    rule.transform, frame.col(feature), frame.timestamps, baseline);
                series = apply_normalization(rule.normalization, series, &degenerate);
                return std::make_pair(std::move(series), degenerate);
            });
            ColumnProvenance prov{rule.transform, rule.normalization, {}};
            if (result.second) prov.flags.push_back("degenerate_scale");
            canonical.frame.columns.push_back(feature);
            canonical.frame.values.push_back(trim_to_shared(
                std::move(result.first), transform_warmup(rule.transform, baseline)));
            canonical.provenance[feature] = std::move(prov);
        }
    }

    TransformedFrame residual;
    residual.frame.timestamps = shared_ts;
    for (const auto& [family, features] : space.residual) {
        if (features.empty()) continue;
        const auto& rule = rule_for(taxonomy.residual_families, family);
        for (const auto& feature : features) {
            auto result = with_column_context(feature, [&] {
                bool degenerate = false;
                auto series =
                    transform_residual(frame.col(feature), rule.transform, &degenerate);
                return std::make_pair(std::move(series), degenerate);
            });
            ColumnProvenance prov{rule.transform, rule.normalization, {}};
            if (result.second) prov.flags.push_back("degenerate_scale");
            residual.frame.columns.push_back(feature);
            residual.frame.values.push_back(trim_to_shared(
                std::move(result.first), transform_warmup(rule.transform, baseline)));
            residual.provenance[feature] = std::move(prov);
        }
    }

    canonical.frame.validate();
    residual.frame.validate();
    return {std::move(canonical), std::move(residual)};
}

} // namespace semseg
