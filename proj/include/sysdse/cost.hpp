#pragma once

// Closed-form compute-only model of a monolithic systolic array running one
// GEMM. Each fold costs a fill/skew term 2R + C - 2 plus the temporal
// dimension of the dataflow; partial folds are charged in full.
//
//   dataflow | rows <- | cols <- | temporal | per-fold demand (ifmap, filter, ofmap)
//   ---------+---------+---------+----------+--------------------------------------
//   OS       |   M     |   N     |    K     | (R*K, K*C, R*C)
//   WS       |   K     |   N     |    M     | (M*R, R*C, M*C)
//   IS       |   K     |   M     |    N     | (R*C, R*N, C*N)
//
// Elements are one byte, so demands are byte counts.

#include <cstdint>

#include "sysdse/core.hpp"

namespace sysdse {

struct FoldPlan {
    std::int64_t fold_count = 1;
    Cycles fold_cycles = 1;
    std::int64_t ifmap_bytes = 0;
    std::int64_t filter_bytes = 0;
    std::int64_t ofmap_bytes = 0;
};

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

FoldPlan fold_geometry(const GemmWorkload& w, const ArrayShape& s, Dataflow d);

/// fold_count * fold_cycles.
Cycles compute_runtime(const GemmWorkload& w, const ArrayShape& s, Dataflow d);

/// Fraction of the PEs holding useful work, averaged over folds.
double mapping_utilization(const GemmWorkload& w, const ArrayShape& s, Dataflow d);

}  // namespace sysdse
