#include "sysdse/sched.hpp"

#include <algorithm>

#include "sysdse/cost.hpp"

namespace sysdse {

Cycles unit_runtime(const GemmWorkload& w, const ComputeUnit& u, Dataflow d) {
    if (u.count == 1) return compute_runtime(w, u.shape, d);
    const GemmWorkload chunk{ceil_div(w.m, u.count), w.n, w.k};
    return compute_runtime(chunk, u.shape, d);
}

ScheduleCost schedule_cost(std::span<const GemmWorkload> workloads, const Platform& platform, const Schedule& s) {
    const std::size_t x = platform.size();
    if (workloads.size() != x) {
        throw ShapeError("expected " + std::to_string(x) + " workloads, got " + std::to_string(workloads.size()));
    }
    validate(s, x);

    ScheduleCost cost;
    cost.per_workload_cycles.reserve(x);
    for (std::size_t i = 0; i < x; ++i) {
        const auto unit = static_cast<std::size_t>(s.assignment[i]);
        const Cycles c = unit_runtime(workloads[i], platform.units()[unit], s.dataflows[unit]);
        cost.per_workload_cycles.push_back(c);
        cost.critical_path = std::max(cost.critical_path, c);
        cost.cumulative += c;
    }
    return cost;
}

}  // namespace sysdse
