#pragma once

// Query sampling, oracle labelling and CSV persistence of the three datasets.
//
// CSV schemas (header exact, LF line endings):
//   case 1  m,n,k,mac_exp,label
//   case 2  m,n,k,rows,cols,dataflow,bw,budget_kb,label
//   case 3  m0,n0,k0,...,m{x-1},n{x-1},k{x-1},label

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sysdse/labels.hpp"
#include "sysdse/mem.hpp"
#include "sysdse/oracle.hpp"
#include "sysdse/rng.hpp"

namespace sysdse {

struct SamplingRanges {
    std::int64_t m_max = 100000;
    std::int64_t n_max = 10000;
    std::int64_t k_max = 1000;
};

/// Uniform integers in [1, m_max] x [1, n_max] x [1, k_max].
GemmWorkload sample_workload(Rng& rng, const SamplingRanges& ranges);

/// Input-space sampling parameters for all three cases.
struct GenParams {
    SamplingRanges ranges;
    int mac_exp_min = 8;  ///< case 1
    int mac_exp_max = 18;
    Case1Params array_space;  ///< case 2 draws its array config from this table
    std::int64_t bw_min = 1;  ///< case 2, bytes/cycle
    std::int64_t bw_max = 100;
    std::int64_t budget_min_kb = 300;  ///< case 2
    std::int64_t budget_max_kb = 3000;
    std::int64_t budget_step_kb = 100;
};

struct DatasetRecord {
    std::vector<std::int64_t> features;
    LabelId label = 0;

    bool operator==(const DatasetRecord&) const = default;
};

struct Dataset {
    int case_id = 0;  ///< 0 for a generic dataset with an inferred schema
    std::vector<std::string> columns;  ///< feature column names, label excluded
    std::vector<DatasetRecord> records;
    std::size_t skipped = 0;  ///< infeasible draws resampled during generation

    bool operator==(const Dataset& o) const {
        return case_id == o.case_id && columns == o.columns && records == o.records;
    }
};

/// Feature column names; `units` is the platform size for case 3.
std::vector<std::string> feature_columns(int case_id, std::size_t units = 4);

std::vector<std::int64_t> to_features(const Case1Query& q);
std::vector<std::int64_t> to_features(const Case2Query& q);
std::vector<std::int64_t> to_features(std::span<const GemmWorkload> workloads);

Case1Query case1_query(std::span<const std::int64_t> features);
Case2Query case2_query(std::span<const std::int64_t> features);
std::vector<GemmWorkload> case3_workloads(std::span<const std::int64_t> features);

/// Runs the case's oracle on a raw feature row.
LabelId label_features(const AnyTable& table, std::span<const std::int64_t> features);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Draws `count` queries and labels each with the oracle. Record i is drawn
/// from its own stream derived from (seed, i), so the output is identical
/// for any thread count. Infeasible draws are redrawn from the same stream
/// and counted in `skipped`. `progress` fires after every 10k records.
Dataset generate_dataset(const AnyTable& table, std::size_t count, std::uint64_t seed, const GenParams& params = {},
                         unsigned threads = 1, const ProgressFn& progress = {});

/// Expected layout of a dataset file.
struct CsvSchema {
    int case_id = 0;
    std::vector<std::string> columns;  ///< feature columns, label excluded
    std::size_t num_labels = 0;        ///< exclusive upper bound on labels
};

CsvSchema schema_for(const AnyTable& table);

void write_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);

/// Strict read: header must equal the schema, every row must have the right
/// arity and a label below num_labels. Errors name the 1-based line.
Dataset read_csv(const std::filesystem::path& path, const CsvSchema& schema);

/// Reads any integer CSV whose last column is `label`.
Dataset read_csv_any(const std::filesystem::path& path);

}  // namespace sysdse
