#pragma once

// Exhaustive-search labelers. Each call is a fresh full scan of the label
// table; ties resolve to the smallest id.

#include <span>

#include "sysdse/labels.hpp"
#include "sysdse/mem.hpp"

namespace sysdse {

/// A GEMM plus a MAC budget of 2^mac_exp units.
struct Case1Query {
    GemmWorkload workload;
    int mac_exp = 18;

    bool operator==(const Case1Query&) const = default;
};

/// Id minimizing compute runtime among shapes with rows * cols <= 2^mac_exp.
LabelId oracle_case1(const Case1Query& q, const Case1Table& table);

/// Id minimizing (total stalls, total KB, id) among entries within budget.
LabelId oracle_case2(const Case2Query& q, const Case2Table& table);

/// Id minimizing (critical path, cumulative runtime, id).
LabelId oracle_case3(std::span<const GemmWorkload> workloads, const Platform& platform, const Case3Table& table);

}  // namespace sysdse
