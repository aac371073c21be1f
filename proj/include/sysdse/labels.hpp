#pragma once

// Deterministic enumeration of the three output label spaces. Every table
// is a bijection between a dense id range [0, size) and configurations, with
// a fixed ordering so ids are stable across runs and machines.

#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sysdse/core.hpp"

namespace sysdse {

/// Array shapes 2^a x 2^b with a, b >= min_exp and a + b <= max_mac_exp.
struct Case1Params {
    int min_exp = 4;
    int max_mac_exp = 18;

    bool operator==(const Case1Params&) const = default;
};

/// Buffer size grid {min_kb, min_kb + step_kb, ..., max_kb} per operand.
struct Case2Params {
    std::int64_t min_kb = 100;
    std::int64_t max_kb = 1000;
    std::int64_t step_kb = 100;

    bool operator==(const Case2Params&) const = default;
};

struct Case3Params {
    Platform platform = Platform::default_platform();

    bool operator==(const Case3Params&) const = default;
};

template <class Entry, class Params>
class LabelTable {
public:
    using entry_type = Entry;
    using params_type = Params;

    LabelTable(int case_id, Params params, std::vector<Entry> entries)
        : case_id_(case_id), params_(std::move(params)), entries_(std::move(entries)) {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (!index_.emplace(entries_[i], static_cast<LabelId>(i)).second) {
                throw ParameterError("duplicate label table entry at id " + std::to_string(i));
            }
        }
    }

    int case_id() const { return case_id_; }
    const Params& params() const { return params_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    const Entry& at(LabelId id) const {
        if (id >= entries_.size()) {
            throw DataError("label id " + std::to_string(id) + " outside table of size " +
                            std::to_string(entries_.size()));
        }
        return entries_[id];
    }

    std::optional<LabelId> find(const Entry& e) const {
        auto it = index_.find(e);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    int case_id_;
    Params params_;
    std::vector<Entry> entries_;
    std::map<Entry, LabelId> index_;
};

using Case1Table = LabelTable<ArrayConfig, Case1Params>;
using Case2Table = LabelTable<BufferSizes, Case2Params>;
using Case3Table = LabelTable<Schedule, Case3Params>;

/// Ordered by (row exponent, column exponent, dataflow). Entry count is
/// 3 (D+1)(D+2)/2 with D = max_mac_exp - 2 min_exp.
Case1Table enumerate_case1_labels(int min_exp = 4, int max_mac_exp = 18);

/// Cartesian cube of sizes, ifmap outermost.
Case2Table enumerate_case2_labels(std::int64_t min_kb = 100, std::int64_t max_kb = 1000,
                                  std::int64_t step_kb = 100);

/// id = perm_index * 3^x + sum_i code(dataflow_i) * 3^i, permutations in
/// lexicographic order. Entry count is 3^x * x!.
Case3Table enumerate_case3_labels(const Platform& platform);

/// Id of a case-3 entry computed arithmetically from its fields.
LabelId case3_id(const Schedule& s);

/// Tagged union over the three tables, for code that handles any case.
using AnyTable = std::variant<Case1Table, Case2Table, Case3Table>;

int case_id(const AnyTable& t);
std::size_t table_size(const AnyTable& t);

/// Builds the default-parameter table for a case id in {1,2,3}.
AnyTable default_table(int case_id);

// JSON: {"case": int, "params": {...}, "entries": [...]}, entries in id order.
nlohmann::json to_json(const Platform& p);
Platform platform_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const AnyTable& t);
nlohmann::json to_json(const AnyTable& t);
nlohmann::json entry_to_json(const AnyTable& t, LabelId id);

/// Regenerates a table from the "case" and "params" members of `j`.
AnyTable table_from_params(int case_id, const nlohmann::json& params);

/// Parses a serialized table, regenerating it from its parameters and
/// checking that the stored entries agree. Throws DataError on mismatch.
AnyTable table_from_json(const nlohmann::json& j);

/// One-line human readable form of an entry, e.g. "rows=16 cols=16 dataflow=WS".
std::string describe_entry(const AnyTable& t, LabelId id);

}  // namespace sysdse
