// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace semseg {

/// Linear-interpolation quantile (the same convention as numpy's
/// default). q must lie in [0, 1]; the input need not be sorted.
/// Throws DataError on an empty input.
double quantile(std::vector<double> values, double q);

/// Median via quantile(values, 0.5).
double median(std::vector<double> values);

/// Interquartile range: quantile 0.75 minus quantile 0.25.
double iqr(std::vector<double> values);

/// Trailing rolling median: output[t] is the median of the window
/// values[max(0, t-w+1) .. t]. Window w must be >= 1.
std::vector<double> rolling_median(const std::vector<double>& values, std::size_t w);

double mean(const std::vector<double>& values);

/// Sample variance (n-1 denominator). Returns 0 for n < 2.
double sample_variance(const std::vector<double>& values);

/// Pearson correlation. Throws UndefinedCorrelationError when either
/// input is constant, DataError on a length mismatch or n < 2.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Mid-rank vector: ties receive the average of the ranks they span.
/// Ranks are 1-based.
std::vector<double> mid_ranks(const std::vector<double>& values);

/// Spearman rank correlation with mid-rank tie handling, clamped to
/// [-1, 1]. Throws UndefinedCorrelationError when either input is
/// constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Standard normal survival function P(Z > z), computed with erfc so
/// the far tail keeps precision.
double normal_sf(double z);

} // namespace semseg
