#include "sysdse/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sysdse/cost.hpp"
#include "sysdse/parallel.hpp"
#include "sysdse/sched.hpp"

namespace sysdse {

double accuracy(std::span<const LabelId> predictions, std::span<const LabelId> labels) {
    if (predictions.size() != labels.size()) throw ShapeError("prediction and label counts differ");
    if (labels.empty()) throw ShapeError("accuracy of an empty set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double geomean(std::span<const double> values) {
    if (values.empty()) throw ShapeError("geomean of an empty set");
    double log_sum = 0.0;
    for (double v : values) {
        if (!(v > 0.0)) throw DataError("geomean needs strictly positive values");
        log_sum += std::log(v);
    }
    return std::exp(log_sum / static_cast<double>(values.size()));
}

Cycles label_cost(const AnyTable& table, std::span<const std::int64_t> features, LabelId id) {
    return std::visit(
        [&](const auto& tab) -> Cycles {
            using T = std::decay_t<decltype(tab)>;
            const auto& e = tab.at(id);
            if constexpr (std::is_same_v<T, Case1Table>) {
                const auto q = case1_query(features);
                return compute_runtime(q.workload, e.shape, e.dataflow);
            } else if constexpr (std::is_same_v<T, Case2Table>) {
                return total_stalls(case2_query(features), e).total_runtime;
            } else {
                const auto ws = case3_workloads(features);
                return schedule_cost(ws, tab.params().platform, e).critical_path;
            }
        },
        table);
}

bool label_feasible(const AnyTable& table, std::span<const std::int64_t> features, LabelId id) {
    if (const auto* t1 = std::get_if<Case1Table>(&table)) {
        const auto q = case1_query(features);
        return t1->at(id).shape.macs() <= (std::int64_t{1} << q.mac_exp);
    }
    if (const auto* t2 = std::get_if<Case2Table>(&table)) {
        return t2->at(id).total_kb() <= case2_query(features).budget_kb;
    }
    return true;
}

EvalReport normalized_performance(const AnyTable& table, std::span<const std::vector<std::int64_t>> queries,
                                  std::span<const LabelId> predictions, std::span<const LabelId> labels,
                                  unsigned threads) {
    if (queries.size() != predictions.size() || queries.size() != labels.size()) {
        throw ShapeError("queries, predictions and labels must have equal lengths");
    }
    if (queries.empty()) throw ShapeError("nothing to evaluate");

    EvalReport r;
    r.count = queries.size();
    r.ratios.assign(r.count, 0.0);
    std::vector<char> infeasible(r.count, 0);
    parallel_for(0, r.count, threads, [&](std::size_t i) {
        const auto& f = queries[i];
        const Cycles opt = label_cost(table, f, labels[i]);
        const Cycles check = label_cost(table, f, label_features(table, f));
        if (opt != check) {
            throw DataError("label " + std::to_string(labels[i]) + " of sample " + std::to_string(i) +
                            " is not optimal (cost " + std::to_string(opt) + " vs oracle " + std::to_string(check) + ")");
        }
        const Cycles pred = label_cost(table, f, predictions[i]);
        infeasible[i] = label_feasible(table, f, predictions[i]) ? 0 : 1;
        r.ratios[i] = std::min(1.0, static_cast<double>(opt) / static_cast<double>(pred));
    });

    r.accuracy = accuracy(predictions, labels);
    r.geomean_normalized_perf = geomean(r.ratios);
    r.infeasible_prediction_rate =
        static_cast<double>(std::count(infeasible.begin(), infeasible.end(), 1)) / static_cast<double>(r.count);
    return r;
}

EvalReport normalized_performance(const AnyTable& table, const Dataset& ds, std::span<const LabelId> predictions,
                                  unsigned threads) {
    std::vector<std::vector<std::int64_t>> queries;
    std::vector<LabelId> labels;
    queries.reserve(ds.records.size());
    labels.reserve(ds.records.size());
    for (const auto& rec : ds.records) {
        queries.push_back(rec.features);
        labels.push_back(rec.label);
    }
    return normalized_performance(table, queries, predictions, labels, threads);
}

nlohmann::json to_json(const EvalReport& r) {
    return {{"count", r.count},
            {"accuracy", r.accuracy},
            {"geomean", r.geomean_normalized_perf},
            {"infeasible_rate", r.infeasible_prediction_rate}};
}

}  // namespace sysdse
