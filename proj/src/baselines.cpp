// SPDX-License-Identifier: Apache-2.0
#include "semseg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semseg/errors.hpp"

namespace semseg {

namespace {

using Matrix = std::vector<std::vector<double>>;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues and eigenvectors (columns of V), unsorted.
void jacobi_eigen(Matrix a, std::vector<double>& values, Matrix& vectors) {
    const std::size_t n = a.size();
    vectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[i][j]));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (std::sqrt(off) <= 1e-14 * scale * static_cast<double>(n)) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) <= 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vectors[k][p];
                    const double vkq = vectors[k][q];
                    vectors[k][p] = c * vkp - s * vkq;
                    vectors[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];
}

} // namespace

PcaModel pca_fit(const Matrix& X, std::size_t k) {
    if (X.empty()) throw DataError("pca_fit: empty matrix");
    const std::size_t n = X.size();
    const std::size_t d = X[0].size();
    for (const auto& row : X)
        if (row.size() != d) throw DataError("pca_fit: ragged matrix");
    if (k < 1 || k > d) throw ConfigError("pca_fit: need 1 <= k <= d");
    if (n <= k) throw InsufficientDataError("pca_fit: need more rows than components");

    PcaModel model;
    model.means.assign(d, 0.0);
    for (const auto& row : X)
        for (std::size_t j = 0; j < d; ++j) model.means[j] += row[j];
    for (double& m : model.means) m /= static_cast<double>(n);

    Matrix cov(d, std::vector<double>(d, 0.0));
    for (const auto& row : X) {
        for (std::size_t i = 0; i < d; ++i) {
            const double di = row[i] - model.means[i];
            for (std::size_t j = i; j < d; ++j)
                cov[i][j] += di * (row[j] - model.means[j]);
        }
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            cov[i][j] /= static_cast<double>(n - 1);
            cov[j][i] = cov[i][j];
        }

    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += cov[i][i];

    std::vector<double> values;
    Matrix vectors;
    jacobi_eigen(std::move(cov), values, vectors);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return a < b;
    });

    const double rank_floor = 1e-12 * std::max(trace, 1.0);
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t src = order[c];
        std::vector<double> component(d);
        for (std::size_t j = 0; j < d; ++j) component[j] = vectors[j][src];
        // Sign convention: the largest-magnitude entry is positive.
        std::size_t peak = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (std::abs(component[j]) > std::abs(component[peak])) peak = j;
        if (component[peak] < 0.0)
            for (double& v : component) v = -v;
        double variance = values[src];
        if (variance < rank_floor) {
            variance = std::max(variance, 0.0);
            model.rank_deficient = true;
        }
        model.components.push_back(std::move(component));
        model.explained_variance.push_back(variance);
    }
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& X) {
    const std::size_t d = model.means.size();
    const std::size_t k = model.components.size();
    Matrix out(X.size(), std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].size() != d) throw DataError("pca_transform: dimension mismatch");
        for (std::size_t c = 0; c < k; ++c) {
            double acc = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                acc += (X[i][j] - model.means[j]) * model.components[c][j];
            out[i][c] = acc;
        }
    }
    return out;
}

Matrix pca_inverse_transform(const PcaModel& model, const Matrix& Z) {
    const std::size_t d = model.means.size();
    const std::size_t k = model.components.size();
    Matrix out(Z.size(), std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < Z.size(); ++i) {
        if (Z[i].size() != k)
            throw DataError("pca_inverse_transform: dimension mismatch");
        for (std::size_t j = 0; j < d; ++j) {
            double acc = model.means[j];
            for (std::size_t c = 0; c < k; ++c)
                acc += Z[i][c] * model.components[c][j];
            out[i][j] = acc;
        }
    }
    return out;
}

TransformedFrame concat_frames(const TransformedFrame& left,
                               const TransformedFrame& right) {
    if (left.frame.timestamps != right.frame.timestamps)
        throw DataError("concat_frames: timestamp mismatch");
    TransformedFrame out = left;
    for (std::size_t c = 0; c < right.frame.n_cols(); ++c) {
        out.frame.columns.push_back(right.frame.columns[c]);
        out.frame.values.push_back(right.frame.values[c]);
    }
    out.frame.validate();
    for (const auto& [name, prov] : right.provenance) out.provenance[name] = prov;
    return out;
}

RiskReport compare_representations(const TransformedFrame& canonical,
                                   const TransformedFrame& residual,
                                   const TransformedFrame& full,
                                   const FaultLog& faults, const EvalConfig& config) {
    if (full.frame.n_cols() != canonical.frame.n_cols() + residual.frame.n_cols())
        throw DataError("compare_representations: full space must concatenate "
                        "canonical and residual");
    for (std::size_t c = 0; c < canonical.frame.n_cols(); ++c)
        if (full.frame.columns[c] != canonical.frame.columns[c])
            throw DataError("compare_representations: full space column order "
                            "must start with canonical");
    const std::size_t k = canonical.frame.n_cols();
    const std::vector<RepresentationInput> reps = {
        {"canonical", &canonical.frame, false, 0},
        {"residual", &residual.frame, false, 0},
        {"full", &full.frame, false, 0},
        {"pca", &full.frame, true, k},
    };
    return evaluate_representations(reps, faults, config);
}

} // namespace semseg
