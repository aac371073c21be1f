#include "sysdse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sysdse {

std::vector<std::pair<LabelId, double>> class_histogram(const Dataset& ds) {
    if (ds.records.empty()) throw DataError("class histogram of an empty dataset");
    std::map<LabelId, std::size_t> counts;
    for (const auto& r : ds.records) ++counts[r.label];

    std::vector<std::pair<LabelId, std::size_t>> sorted(counts.begin(), counts.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

    const double n = static_cast<double>(ds.records.size());
    std::vector<std::pair<LabelId, double>> out;
    out.reserve(sorted.size());
    for (const auto& [label, c] : sorted) out.emplace_back(label, static_cast<double>(c) / n);
    return out;
}

double head_mass(const std::vector<std::pair<LabelId, double>>& histogram, std::size_t top) {
    double mass = 0.0;
    for (std::size_t i = 0; i < std::min(top, histogram.size()); ++i) mass += histogram[i].second;
    return mass;
}

std::pair<std::vector<double>, std::vector<double>> standardize(std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    const std::size_t d = rows.front().size();
    std::vector<double> mean(d, 0.0);
    std::vector<double> scale(d, 0.0);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
    }
    for (auto& m : mean) m /= static_cast<double>(rows.size());
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < d; ++j) scale[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
    }
    for (auto& s : scale) {
        s = std::sqrt(s / static_cast<double>(rows.size()));
        if (!(s > 1e-300)) s = 1.0;
    }
    for (auto& r : rows) {
        for (std::size_t j = 0; j < d; ++j) r[j] = (r[j] - mean[j]) / scale[j];
    }
    return {mean, scale};
}

namespace {

using Matrix = std::vector<std::vector<double>>;

std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& v) {
    std::vector<double> out(v.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
    }
    return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize(std::vector<double>& v) {
    const double n = std::sqrt(dot(v, v));
    for (auto& x : v) x /= n;
}

void remove_component(std::vector<double>& v, const std::vector<double>& u) {
    const double p = dot(v, u);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * u[i];
}

void fix_sign(std::vector<double>& v) {
    std::size_t big = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[big])) big = i;
    }
    if (v[big] < 0.0) {
        for (auto& x : v) x = -x;
    }
}

// Dominant eigenvector of a symmetric PSD matrix, kept orthogonal to `avoid`.
std::vector<double> power_iteration(const Matrix& a, const std::vector<double>* avoid) {
    const std::size_t d = a.size();
    // Fixed, non-degenerate start vector.
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i) + 0.01 * static_cast<double>(i * i);
    if (avoid) remove_component(v, *avoid);
    normalize(v);

    for (int it = 0; it < kPowerIterationMaxIters; ++it) {
        auto next = mat_vec(a, v);
        if (avoid) remove_component(next, *avoid);
        const double n = std::sqrt(dot(next, next));
        if (!(n > 1e-300)) {
            // Null space: any unit vector orthogonal to `avoid` is an eigenvector.
            break;
        }
        for (auto& x : next) x /= n;
        fix_sign(next);
        double diff = 0.0;
        for (std::size_t i = 0; i < d; ++i) diff = std::max(diff, std::abs(next[i] - v[i]));
        v = std::move(next);
        if (diff < kPowerIterationTolerance) break;
    }
    if (avoid) {
        remove_component(v, *avoid);
        normalize(v);
    }
    fix_sign(v);
    return v;
}

}  // namespace

PcaResult top2_pca(const std::vector<std::vector<double>>& rows, std::span<const LabelId> labels,
                   std::array<LabelId, 2> classes) {
    if (rows.size() != labels.size()) throw ShapeError("row and label counts differ");
    if (rows.empty() || rows.front().size() < 2) throw DataError("PCA needs at least two feature dimensions");
    const std::size_t d = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != d) throw ShapeError("PCA rows have inconsistent widths");
    }
    for (LabelId c : classes) {
        const auto n = std::count(labels.begin(), labels.end(), c);
        if (n < 3) {
            throw DataError("class " + std::to_string(c) + " has " + std::to_string(n) +
                            " points, PCA needs at least 3");
        }
    }

    std::vector<std::vector<double>> z = rows;
    PcaResult res;
    std::tie(res.mean, res.scale) = standardize(z);

    Matrix cov(d, std::vector<double>(d, 0.0));
    for (const auto& r : z) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i; j < d; ++j) cov[i][j] += r[i] * r[j];
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov[i][j] /= static_cast<double>(z.size());
            cov[j][i] = cov[i][j];
        }
    }

    res.components[0] = power_iteration(cov, nullptr);
    res.eigenvalues[0] = dot(res.components[0], mat_vec(cov, res.components[0]));
    // Deflate, then iterate in the orthogonal complement of the first component.
    Matrix deflated = cov;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            deflated[i][j] -= res.eigenvalues[0] * res.components[0][i] * res.components[0][j];
        }
    }
    res.components[1] = power_iteration(deflated, &res.components[0]);
    res.eigenvalues[1] = dot(res.components[1], mat_vec(cov, res.components[1]));

    for (std::size_t i = 0; i < z.size(); ++i) {
        if (labels[i] != classes[0] && labels[i] != classes[1]) continue;
        res.projections.push_back({dot(z[i], res.components[0]), dot(z[i], res.components[1]), labels[i]});
    }
    return res;
}

PcaResult top2_pca(const Dataset& ds, std::array<LabelId, 2> classes) {
    std::vector<std::vector<double>> rows;
    std::vector<LabelId> labels;
    rows.reserve(ds.records.size());
    for (const auto& r : ds.records) {
        rows.emplace_back(r.features.begin(), r.features.end());
        labels.push_back(r.label);
    }
    return top2_pca(rows, labels, classes);
}

}  // namespace sysdse
