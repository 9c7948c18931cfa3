// SPDX-License-Identifier: Apache-2.0
#include "semseg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semseg/errors.hpp"

namespace semseg {

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("quantile: empty input");
    if (q < 0.0 || q > 1.0) throw DataError("quantile: q outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double iqr(std::vector<double> values) {
    if (values.empty()) throw DataError("iqr: empty input");
    std::sort(values.begin(), values.end());
    const auto at = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    };
    return at(0.75) - at(0.25);
}

std::vector<double> rolling_median(const std::vector<double>& values, std::size_t w) {
    if (w == 0) throw DataError("rolling_median: window must be >= 1");
    std::vector<double> out(values.size());
    std::vector<double> window;
    window.reserve(w);
    for (std::size_t t = 0; t < values.size(); ++t) {
        const std::size_t begin = (t + 1 >= w) ? t + 1 - w : 0;
        window.assign(values.begin() + static_cast<std::ptrdiff_t>(begin),
                      values.begin() + static_cast<std::ptrdiff_t>(t) + 1);
        std::sort(window.begin(), window.end());
        const std::size_t n = window.size();
        out[t] = (n % 2 == 1) ? window[n / 2]
                              : 0.5 * (window[n / 2 - 1] + window[n / 2]);
    }
    return out;
}

double mean(const std::vector<double>& values) {
    if (values.empty()) throw DataError("mean: empty input");
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

double sample_variance(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return acc / static_cast<double>(n - 1);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DataError("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw DataError("pearson: need at least two observations");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw UndefinedCorrelationError("pearson: constant input");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> mid_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const double rho = pearson(mid_ranks(x), mid_ranks(y));
    return std::clamp(rho, -1.0, 1.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

} // namespace semseg
