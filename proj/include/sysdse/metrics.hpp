#pragma once

// Scoring of predicted label ids against oracle labels. The normalized
// performance of one sample is optimal cost / predicted cost, where cost is
// compute runtime (case 1), compute + stall runtime (case 2) or critical
// path runtime (case 3).

#include <span>
#include <vector>

#include <json.hpp>

#include "sysdse/data.hpp"

namespace sysdse {

struct EvalReport {
    std::size_t count = 0;
    double accuracy = 0.0;
    double geomean_normalized_perf = 0.0;
    double infeasible_prediction_rate = 0.0;
    std::vector<double> ratios;
};

double accuracy(std::span<const LabelId> predictions, std::span<const LabelId> labels);

/// Geometric mean of strictly positive values, summed in index order.
double geomean(std::span<const double> values);

/// Cost of running `id` for the query encoded in `features`.
Cycles label_cost(const AnyTable& table, std::span<const std::int64_t> features, LabelId id);

/// True if `id` satisfies the query's MAC cap (case 1) or budget (case 2).
bool label_feasible(const AnyTable& table, std::span<const std::int64_t> features, LabelId id);

/// Scores predictions for the queries of `queries` (raw feature rows).
/// Each label is re-checked against a fresh oracle run; a label whose cost
/// differs from the oracle's throws DataError. Infeasible predictions are
/// scored by their raw cost, with the ratio capped at 1, and counted in
/// infeasible_prediction_rate.
EvalReport normalized_performance(const AnyTable& table, std::span<const std::vector<std::int64_t>> queries,
                                  std::span<const LabelId> predictions, std::span<const LabelId> labels,
                                  unsigned threads = 1);

/// Convenience overload: queries and labels come from the dataset.
EvalReport normalized_performance(const AnyTable& table, const Dataset& ds, std::span<const LabelId> predictions,
                                  unsigned threads = 1);

/// {"count", "accuracy", "geomean", "infeasible_rate"}
nlohmann::json to_json(const EvalReport& r);

}  // namespace sysdse
