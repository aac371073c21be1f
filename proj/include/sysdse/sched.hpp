#pragma once

#include <span>
#include <vector>

#include "sysdse/core.hpp"

namespace sysdse {

struct ScheduleCost {
    std::vector<Cycles> per_workload_cycles;
    Cycles critical_path = 0;  ///< slowest workload
    Cycles cumulative = 0;     ///< sum over workloads
};

/// Runtime of one workload on one unit. A unit with count > 1 splits M into
/// count chunks of ceil(M / count) rows that run in parallel.
Cycles unit_runtime(const GemmWorkload& w, const ComputeUnit& u, Dataflow d);

/// Workload i runs on unit s.assignment[i] with that unit's dataflow.
ScheduleCost schedule_cost(std::span<const GemmWorkload> workloads, const Platform& platform, const Schedule& s);

}  // namespace sysdse
