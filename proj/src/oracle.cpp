#include "sysdse/oracle.hpp"

#include <array>
#include <limits>
#include <tuple>

#include "sysdse/cost.hpp"
#include "sysdse/sched.hpp"

namespace sysdse {

LabelId oracle_case1(const Case1Query& q, const Case1Table& table) {
    validate(q.workload);
    if (q.mac_exp > table.params().max_mac_exp) {
        throw ParameterError("mac_exp " + std::to_string(q.mac_exp) + " exceeds table bound " +
                             std::to_string(table.params().max_mac_exp));
    }
    if (q.mac_exp < 0 || q.mac_exp > 62) throw ParameterError("mac_exp out of range");
    const std::int64_t mac_cap = std::int64_t{1} << q.mac_exp;

    std::optional<LabelId> best;
    Cycles best_runtime = std::numeric_limits<Cycles>::max();
    const auto& entries = table.entries();
    for (std::size_t id = 0; id < entries.size(); ++id) {
        const ArrayConfig& cfg = entries[id];
        if (cfg.shape.macs() > mac_cap) continue;
        const Cycles rt = compute_runtime(q.workload, cfg.shape, cfg.dataflow);
        if (rt < best_runtime) {
            best_runtime = rt;
            best = static_cast<LabelId>(id);
        }
    }
    if (!best) throw InfeasibleError("no array shape fits within 2^" + std::to_string(q.mac_exp) + " MACs");
    return *best;
}

LabelId oracle_case2(const Case2Query& q, const Case2Table& table) {
    std::optional<LabelId> best;
    std::tuple<Cycles, std::int64_t> best_key{std::numeric_limits<Cycles>::max(), 0};
    const auto& entries = table.entries();
    for (std::size_t id = 0; id < entries.size(); ++id) {
        const BufferSizes& b = entries[id];
        if (b.total_kb() > q.budget_kb) continue;
        const std::tuple<Cycles, std::int64_t> key{total_stalls(q, b).total_stalls, b.total_kb()};
        if (key < best_key) {
            best_key = key;
            best = static_cast<LabelId>(id);
        }
    }
    if (!best) throw InfeasibleError("no buffer configuration fits a budget of " + std::to_string(q.budget_kb) + " KB");
    return *best;
}

LabelId oracle_case3(std::span<const GemmWorkload> workloads, const Platform& platform, const Case3Table& table) {
    const std::size_t x = platform.size();
    if (workloads.size() != x) {
        throw ShapeError("expected " + std::to_string(x) + " workloads, got " + std::to_string(workloads.size()));
    }
    if (!(table.params().platform == platform)) throw ShapeError("label table was built for a different platform");

    // runtime[w][u][d], evaluated once per query.
    std::vector<std::array<Cycles, kNumDataflows>> runtime(x * x);
    for (std::size_t w = 0; w < x; ++w) {
        validate(workloads[w]);
        for (std::size_t u = 0; u < x; ++u) {
            for (Dataflow d : kAllDataflows) {
                runtime[w * x + u][static_cast<std::size_t>(code(d))] = unit_runtime(workloads[w], platform.units()[u], d);
            }
        }
    }

    LabelId best = 0;
    std::tuple<Cycles, Cycles> best_key{std::numeric_limits<Cycles>::max(), std::numeric_limits<Cycles>::max()};
    const auto& entries = table.entries();
    for (std::size_t id = 0; id < entries.size(); ++id) {
        const Schedule& s = entries[id];
        Cycles critical = 0;
        Cycles cumulative = 0;
        for (std::size_t w = 0; w < x; ++w) {
            const auto u = static_cast<std::size_t>(s.assignment[w]);
            const Cycles c = runtime[w * x + u][static_cast<std::size_t>(code(s.dataflows[u]))];
            critical = std::max(critical, c);
            cumulative += c;
        }
        const std::tuple<Cycles, Cycles> key{critical, cumulative};
        if (key < best_key) {
            best_key = key;
            best = static_cast<LabelId>(id);
        }
    }
    return best;
}

}  // namespace sysdse
