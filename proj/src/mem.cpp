#include "sysdse/mem.hpp"

#include <algorithm>

#include "sysdse/cost.hpp"

namespace sysdse {

Cycles operand_stalls(std::int64_t demand_bytes, std::int64_t capacity_bytes, std::int64_t bandwidth,
                      Cycles fold_cycles, std::int64_t fold_count) {
    if (demand_bytes < 1 || capacity_bytes < 1 || bandwidth < 1 || fold_count < 1) {
        throw ParameterError("operand_stalls needs demand, capacity, bandwidth and fold count >= 1");
    }
    const Cycles transfer = ceil_div(demand_bytes, bandwidth);
    const std::int64_t resident = capacity_bytes / demand_bytes;
    if (resident >= 2) {
        return transfer + (fold_count - 1) * std::max<Cycles>(0, transfer - fold_cycles);
    }
    if (resident == 1) {
        return fold_count * transfer;
    }
    return fold_count * transfer * ceil_div(demand_bytes, capacity_bytes);
}

StallReport total_stalls(const Case2Query& q, const BufferSizes& buffers) {
    validate(q.workload);
    if (q.bandwidth < 1) throw ParameterError("bandwidth must be >= 1");
    const FoldPlan plan = fold_geometry(q.workload, q.array.shape, q.array.dataflow);

    StallReport r;
    r.ifmap_stalls = operand_stalls(plan.ifmap_bytes, buffers.ifmap_kb * kBytesPerKb, q.bandwidth,
                                    plan.fold_cycles, plan.fold_count);
    r.filter_stalls = operand_stalls(plan.filter_bytes, buffers.filter_kb * kBytesPerKb, q.bandwidth,
                                     plan.fold_cycles, plan.fold_count);
    r.ofmap_stalls = operand_stalls(plan.ofmap_bytes, buffers.ofmap_kb * kBytesPerKb, q.bandwidth,
                                    plan.fold_cycles, plan.fold_count);
    r.total_stalls = r.ifmap_stalls + r.filter_stalls + r.ofmap_stalls;
    r.total_runtime = plan.fold_count * plan.fold_cycles + r.total_stalls;
    return r;
}

}  // namespace sysdse
