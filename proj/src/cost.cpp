#include "sysdse/cost.hpp"

namespace sysdse {

namespace {

// Spatial (row, col) and temporal dimensions for a dataflow.
struct Mapping {
    std::int64_t row_dim;
    std::int64_t col_dim;
    std::int64_t temporal;
};

Mapping map_dims(const GemmWorkload& w, Dataflow d) {
    switch (d) {
        case Dataflow::OS: return {w.m, w.n, w.k};
        case Dataflow::WS: return {w.k, w.n, w.m};
        case Dataflow::IS: return {w.k, w.m, w.n};
    }
    return {w.m, w.n, w.k};
}

}  // namespace

FoldPlan fold_geometry(const GemmWorkload& w, const ArrayShape& s, Dataflow d) {
    const std::int64_t r = s.rows();
    const std::int64_t c = s.cols();
    const Mapping mp = map_dims(w, d);

    FoldPlan plan;
    plan.fold_count = ceil_div(mp.row_dim, r) * ceil_div(mp.col_dim, c);
    plan.fold_cycles = 2 * r + c + mp.temporal - 2;
    switch (d) {
        case Dataflow::OS:
            plan.ifmap_bytes = r * w.k;
            plan.filter_bytes = w.k * c;
            plan.ofmap_bytes = r * c;
            break;
        case Dataflow::WS:
            plan.ifmap_bytes = w.m * r;
            plan.filter_bytes = r * c;
            plan.ofmap_bytes = w.m * c;
            break;
        case Dataflow::IS:
            plan.ifmap_bytes = r * c;
            plan.filter_bytes = r * w.n;
            plan.ofmap_bytes = c * w.n;
            break;
    }
    return plan;
}

Cycles compute_runtime(const GemmWorkload& w, const ArrayShape& s, Dataflow d) {
    const FoldPlan p = fold_geometry(w, s, d);
    return p.fold_count * p.fold_cycles;
}

double mapping_utilization(const GemmWorkload& w, const ArrayShape& s, Dataflow d) {
    const Mapping mp = map_dims(w, d);
    const std::int64_t padded_rows = ceil_div(mp.row_dim, s.rows()) * s.rows();
    const std::int64_t padded_cols = ceil_div(mp.col_dim, s.cols()) * s.cols();
    return (static_cast<double>(mp.row_dim) * static_cast<double>(mp.col_dim)) /
           (static_cast<double>(padded_rows) * static_cast<double>(padded_cols));
}

}  // namespace sysdse
