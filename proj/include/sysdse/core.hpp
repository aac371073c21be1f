#pragma once

// Domain types shared by the cost models, oracles, dataset pipeline and
// recommender.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sysdse/error.hpp"

namespace sysdse {

using Cycles = std::int64_t;
using LabelId = std::uint32_t;

/// One GEMM instance: C[M x N] = A[M x K] * B[K x N].
struct GemmWorkload {
    std::int64_t m = 1;
    std::int64_t n = 1;
    std::int64_t k = 1;

    auto operator<=>(const GemmWorkload&) const = default;
};

/// Throws ParameterError unless every dimension is >= 1.
void validate(const GemmWorkload& w);

/// Mapping strategy. The numeric codes are used wherever a dataflow is
/// serialized.
enum class Dataflow : std::uint8_t {
    OS = 0,  ///< output stationary
    WS = 1,  ///< weight stationary
    IS = 2,  ///< input stationary
};

inline constexpr Dataflow kAllDataflows[] = {Dataflow::OS, Dataflow::WS, Dataflow::IS};
inline constexpr int kNumDataflows = 3;

constexpr int code(Dataflow d) { return static_cast<int>(d); }
Dataflow dataflow_from_code(std::int64_t code);
std::string_view to_string(Dataflow d);
Dataflow parse_dataflow(std::string_view name);

constexpr bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

/// Exponent of an exact power of two; throws ParameterError otherwise.
int log2_exact(std::int64_t v);

/// Systolic array geometry. Both sides are powers of two.
class ArrayShape {
public:
    ArrayShape(std::int64_t rows, std::int64_t cols);

    static ArrayShape from_exponents(int row_exp, int col_exp);

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }
    std::int64_t macs() const { return rows_ * cols_; }

    auto operator<=>(const ArrayShape&) const = default;

private:
    std::int64_t rows_;
    std::int64_t cols_;
};

struct ArrayConfig {
    ArrayShape shape;
    Dataflow dataflow = Dataflow::OS;

    auto operator<=>(const ArrayConfig&) const = default;
};

/// SRAM operand buffer capacities in KB (1 KB = 1024 bytes).
struct BufferSizes {
    std::int64_t ifmap_kb = 0;
    std::int64_t filter_kb = 0;
    std::int64_t ofmap_kb = 0;

    std::int64_t total_kb() const { return ifmap_kb + filter_kb + ofmap_kb; }

    auto operator<=>(const BufferSizes&) const = default;
};

inline constexpr std::int64_t kBytesPerKb = 1024;

/// `count` identical sub-arrays of the same shape working as one unit.
struct ComputeUnit {
    std::int64_t count = 1;
    ArrayShape shape{1, 1};

    auto operator<=>(const ComputeUnit&) const = default;
};

/// Fixed, ordered set of compute units for the scheduling study.
class Platform {
public:
    explicit Platform(std::vector<ComputeUnit> units);

    /// Four monolithic units: 128x128, 32x32, 256x16, 16x256.
    static Platform default_platform();

    const std::vector<ComputeUnit>& units() const { return units_; }
    std::size_t size() const { return units_.size(); }

    bool operator==(const Platform&) const = default;

private:
    std::vector<ComputeUnit> units_;
};

/// Assignment of workload i to unit assignment[i], plus one dataflow per unit.
struct Schedule {
    std::vector<int> assignment;
    std::vector<Dataflow> dataflows;

    auto operator<=>(const Schedule&) const = default;
};

/// Throws ShapeError unless `s` is a bijection on {0..x-1} with x dataflows.
void validate(const Schedule& s, std::size_t x);

}  // namespace sysdse
