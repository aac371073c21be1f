#pragma once

// Stall model for the three SRAM operand buffers behind one shared,
// bandwidth-limited interface.
//
// For an operand with per-fold demand D bytes, buffer capacity S bytes and
// bandwidth B bytes/cycle, let L = ceil(D / B) be the transfer time of one
// fold and n = floor(S / D) the number of whole fold demands that fit:
//
//   n >= 2  double buffered: initial fill, then only the part of each
//           transfer not hidden behind the previous fold's compute
//           L + (folds - 1) * max(0, L - fold_cycles)
//   n == 1  serialized: every transfer is exposed, folds * L
//   n == 0  undersized: each fold refetches ceil(D / S) times,
//           folds * L * ceil(D / S)
//
// The output buffer drains with the same formula.

#include <cstdint>

#include "sysdse/core.hpp"

namespace sysdse {

struct Case2Query {
    GemmWorkload workload;
    ArrayConfig array;
    std::int64_t bandwidth = 1;  ///< bytes/cycle, shared by all buffers
    std::int64_t budget_kb = 0;  ///< total capacity limit

    bool operator==(const Case2Query&) const = default;
};

struct StallReport {
    Cycles ifmap_stalls = 0;
    Cycles filter_stalls = 0;
    Cycles ofmap_stalls = 0;
    Cycles total_stalls = 0;
    Cycles total_runtime = 0;  ///< compute runtime + total_stalls
};

Cycles operand_stalls(std::int64_t demand_bytes, std::int64_t capacity_bytes, std::int64_t bandwidth,
                      Cycles fold_cycles, std::int64_t fold_count);

StallReport total_stalls(const Case2Query& q, const BufferSizes& buffers);

}  // namespace sysdse
