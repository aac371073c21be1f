#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "sysdse/data.hpp"

namespace sysdse {

/// (label, relative frequency) sorted by descending frequency, ties by label.
std::vector<std::pair<LabelId, double>> class_histogram(const Dataset& ds);

/// Fraction of records covered by the `top` most frequent labels.
double head_mass(const std::vector<std::pair<LabelId, double>>& histogram, std::size_t top);

struct PcaProjection {
    double pc1 = 0.0;
    double pc2 = 0.0;
    LabelId label = 0;
};

struct PcaResult {
    std::vector<double> mean;
    std::vector<double> scale;  ///< z-score divisor, 1 for constant features
    std::array<std::vector<double>, 2> components;
    std::array<double, 2> eigenvalues{};
    std::vector<PcaProjection> projections;  ///< points of the two selected classes
};

inline constexpr double kPowerIterationTolerance = 1e-9;
inline constexpr int kPowerIterationMaxIters = 1000;

/// Z-scores all rows, finds the top two principal components of their
/// covariance by power iteration with deflation, and projects the rows of
/// the two selected classes. Each component's largest-magnitude entry is
/// positive.
PcaResult top2_pca(const std::vector<std::vector<double>>& rows, std::span<const LabelId> labels,
                   std::array<LabelId, 2> classes);

/// Convenience overload over a dataset's raw features.
PcaResult top2_pca(const Dataset& ds, std::array<LabelId, 2> classes);

/// Z-score columns in place; zero-variance columns keep scale 1. Returns
/// (mean, scale).
std::pair<std::vector<double>, std::vector<double>> standardize(std::vector<std::vector<double>>& rows);

}  // namespace sysdse
