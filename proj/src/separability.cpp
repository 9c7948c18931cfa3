// SPDX-License-Identifier: Apache-2.0
#include "semseg/separability.hpp"

#include <algorithm>
#include <cmath>

#include "semseg/errors.hpp"
#include "semseg/rng.hpp"
#include "semseg/stats.hpp"

namespace semseg {

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DataError("spearman_rho: length mismatch");
    if (x.size() < 3) throw DataError("spearman_rho: need at least three samples");
    return spearman(x, y);
}

namespace {

bool is_constant(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

/// Per-segment usable (non-constant) feature lists, preserving order.
struct UsableSegments {
    SegmentMap segments;
    std::vector<std::string> skipped_constant;
};

UsableSegments usable_segments(const MetricFrame& frame, const SegmentMap& segments) {
    UsableSegments out;
    for (const auto& [name, features] : segments) {
        std::vector<std::string> usable;
        for (const auto& feature : features) {
            if (is_constant(frame.col(feature)))
                out.skipped_constant.push_back(feature);
            else
                usable.push_back(feature);
        }
        out.segments.emplace_back(name, std::move(usable));
    }
    return out;
}

} // namespace

IccData compute_icc(const MetricFrame& frame, const SegmentMap& segments) {
    auto usable = usable_segments(frame, segments);
    IccData data;
    data.skipped_constant_features = std::move(usable.skipped_constant);
    for (const auto& [name, features] : usable.segments) {
        if (features.size() < 2) {
            data.excluded_segments.push_back(name);
            continue;
        }
        double acc = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < features.size(); ++i) {
            for (std::size_t j = i + 1; j < features.size(); ++j) {
                const double rho =
                    spearman_rho(frame.col(features[i]), frame.col(features[j]));
                data.omega_in.push_back(rho);
                acc += rho;
                ++pairs;
            }
        }
        data.per_segment[name] = {acc / static_cast<double>(pairs), pairs};
    }
    if (data.per_segment.empty())
        throw DataError("compute_icc: no segment has two usable features");
    return data;
}

IcorData compute_icor(const MetricFrame& frame, const SegmentMap& segments) {
    auto usable = usable_segments(frame, segments);
    SegmentMap active;
    for (auto& [name, features] : usable.segments)
        if (!features.empty()) active.emplace_back(name, std::move(features));
    if (active.size() < 2)
        throw InsufficientDataError("compute_icor: need at least two usable segments");

    IcorData data;
    for (std::size_t a = 0; a < active.size(); ++a) {
        for (std::size_t b = a + 1; b < active.size(); ++b) {
            std::vector<double> cross;
            double acc = 0.0;
            for (const auto& fa : active[a].second) {
                for (const auto& fb : active[b].second) {
                    const double rho = spearman_rho(frame.col(fa), frame.col(fb));
                    cross.push_back(rho);
                    acc += rho;
                }
            }
            const auto key = std::make_pair(active[a].first, active[b].first);
            data.pairs[key] = {acc / static_cast<double>(cross.size()), cross.size()};
            data.pair_medians[key] = median(cross);
            data.omega_out.insert(data.omega_out.end(), cross.begin(), cross.end());
        }
    }
    return data;
}

CorrelationReport summarize(const IccData& icc, const std::optional<IcorData>& icor) {
    if (icc.per_segment.empty()) throw DataError("summarize: empty intra-segment data");
    CorrelationReport report;
    report.per_segment_icc = icc.per_segment;
    report.omega_in = icc.omega_in;
    report.skipped_constant_features = icc.skipped_constant_features;
    report.excluded_segments = icc.excluded_segments;
    report.icc_micro = mean(icc.omega_in);
    std::vector<double> segment_means;
    segment_means.reserve(icc.per_segment.size());
    for (const auto& [name, entry] : icc.per_segment) segment_means.push_back(entry.icc);
    report.icc_macro = mean(segment_means);

    if (icor.has_value()) {
        report.icor_pairs = icor->pairs;
        report.icor_pair_medians = icor->pair_medians;
        report.omega_out = icor->omega_out;
        report.icor_micro = mean(icor->omega_out);
        std::vector<double> pair_means;
        pair_means.reserve(icor->pairs.size());
        for (const auto& [key, entry] : icor->pairs) pair_means.push_back(entry.icor);
        report.icor_macro = mean(pair_means);
        report.delta = report.icc_micro - *report.icor_micro;
    } else {
        report.partial = true;
    }
    return report;
}

CorrelationReport analyze_separability(const MetricFrame& frame,
                                       const SegmentMap& segments) {
    const IccData icc = compute_icc(frame, segments);
    std::optional<IcorData> icor;
    try {
        icor = compute_icor(frame, segments);
    } catch (const InsufficientDataError&) {
        // Single usable segment: report stays partial.
    }
    CorrelationReport report = summarize(icc, icor);
    if (!report.omega_in.empty() && !report.omega_out.empty())
        report.utest = mann_whitney_one_sided(report.omega_in, report.omega_out);
    return report;
}

namespace {

/// Twice the mid-rank of each pooled element; integer-valued so the
/// exact enumeration path can compare U statistics without rounding.
std::vector<long long> doubled_mid_ranks(const std::vector<double>& pooled) {
    const auto ranks = mid_ranks(pooled);
    std::vector<long long> doubled(ranks.size());
    for (std::size_t i = 0; i < ranks.size(); ++i)
        doubled[i] = static_cast<long long>(std::llround(2.0 * ranks[i]));
    return doubled;
}

/// Exact permutation tail: fraction of n1-subsets whose U statistic
/// is >= the observed one. 2U = sum of doubled ranks - n1(n1+1).
double exact_tail_probability(const std::vector<long long>& ranks2,
                              std::size_t n1, long long u2_obs) {
    const std::size_t n = ranks2.size();
    const long long offset = static_cast<long long>(n1) * (static_cast<long long>(n1) + 1);
    unsigned long long total = 0;
    unsigned long long at_least = 0;
    std::vector<std::size_t> pick(n1);
    for (std::size_t i = 0; i < n1; ++i) pick[i] = i;
    while (true) {
        long long sum2 = 0;
        for (std::size_t idx : pick) sum2 += ranks2[idx];
        ++total;
        if (sum2 - offset >= u2_obs) ++at_least;
        // Next combination in lexicographic order.
        std::size_t i = n1;
        while (i-- > 0) {
            if (pick[i] != i + n - n1) {
                ++pick[i];
                for (std::size_t j = i + 1; j < n1; ++j) pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0) return static_cast<double>(at_least) / static_cast<double>(total);
        }
    }
}

} // namespace

UTestResult mann_whitney_one_sided(const std::vector<double>& sample_in,
                                   const std::vector<double>& sample_out) {
    if (sample_in.empty() || sample_out.empty())
        throw DataError("mann_whitney: both samples must be non-empty");
    const std::size_t n1 = sample_in.size();
    const std::size_t n2 = sample_out.size();

    double u = 0.0;
    for (double a : sample_in) {
        for (double b : sample_out) {
            if (a > b)
                u += 1.0;
            else if (a == b)
                u += 0.5;
        }
    }

    UTestResult result;
    result.u = u;
    result.n_in = n1;
    result.n_out = n2;

    if (n1 + n2 <= 20) {
        std::vector<double> pooled = sample_in;
        pooled.insert(pooled.end(), sample_out.begin(), sample_out.end());
        const auto ranks2 = doubled_mid_ranks(pooled);
        const long long u2_obs = static_cast<long long>(std::llround(2.0 * u));
        result.p_value = exact_tail_probability(ranks2, n1, u2_obs);
        result.exact = true;
        return result;
    }

    const double dn1 = static_cast<double>(n1);
    const double dn2 = static_cast<double>(n2);
    const double dn = dn1 + dn2;
    std::vector<double> pooled = sample_in;
    pooled.insert(pooled.end(), sample_out.begin(), sample_out.end());
    std::sort(pooled.begin(), pooled.end());
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j + 1 < pooled.size() && pooled[j + 1] == pooled[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double mean_u = dn1 * dn2 / 2.0;
    const double var_u =
        dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (var_u <= 0.0) {
        result.p_value = 1.0; // every pooled value tied: no evidence
        return result;
    }
    const double z = (u - mean_u - 0.5) / std::sqrt(var_u);
    result.p_value = normal_sf(z);
    return result;
}

std::vector<double> circular_shift(const std::vector<double>& values,
                                   std::size_t offset) {
    const std::size_t n = values.size();
    if (n == 0) return values;
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = values[(t + offset) % n];
    return out;
}

ShiftTestResult circular_shift_test(const MetricFrame& frame,
                                    const SegmentMap& segments,
                                    const ShiftTestOptions& options) {
    const std::size_t T = frame.n_rows();
    if (T < 10) throw DataError("circular_shift_test: need at least 10 rows");
    if (options.repeats < 1) throw ConfigError("circular_shift_test: repeats >= 1");

    Rng rng(options.seed);
    ShiftTestResult result;
    for (std::size_t rep = 0; rep < options.repeats; ++rep) {
        MetricFrame shifted = frame;
        std::size_t shared = 0;
        if (options.paired_offsets)
            shared = options.forced_offset
                         ? *options.forced_offset
                         : static_cast<std::size_t>(rng.uniform_int(
                               1, static_cast<std::int64_t>(T) - 1));
        for (auto& column : shifted.values) {
            std::size_t offset;
            if (options.paired_offsets)
                offset = shared;
            else if (options.forced_offset)
                offset = *options.forced_offset;
            else
                offset = static_cast<std::size_t>(
                    rng.uniform_int(1, static_cast<std::int64_t>(T) - 1));
            column = circular_shift(column, offset);
        }
        const IccData icc = compute_icc(shifted, segments);
        result.per_repeat_icc.push_back(mean(icc.omega_in));
        try {
            const IcorData icor = compute_icor(shifted, segments);
            result.per_repeat_icor.push_back(mean(icor.omega_out));
        } catch (const InsufficientDataError&) {
            // Single-segment frame: no inter-segment statistic.
        }
    }
    result.icc_shift = mean(result.per_repeat_icc);
    if (!result.per_repeat_icor.empty()) result.icor_shift = mean(result.per_repeat_icor);
    return result;
}

} // namespace semseg
