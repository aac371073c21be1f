#include "sysdse/core.hpp"

#include <algorithm>

namespace sysdse {

void validate(const GemmWorkload& w) {
    if (w.m < 1 || w.n < 1 || w.k < 1) {
        throw ParameterError("GEMM dimensions must be >= 1, got (" + std::to_string(w.m) + "," +
                             std::to_string(w.n) + "," + std::to_string(w.k) + ")");
    }
}

Dataflow dataflow_from_code(std::int64_t code) {
    if (code < 0 || code >= kNumDataflows) {
        throw ParameterError("invalid dataflow code " + std::to_string(code));
    }
    return static_cast<Dataflow>(code);
}

std::string_view to_string(Dataflow d) {
    switch (d) {
        case Dataflow::OS: return "OS";
        case Dataflow::WS: return "WS";
        case Dataflow::IS: return "IS";
    }
    return "?";
}

Dataflow parse_dataflow(std::string_view name) {
    for (Dataflow d : kAllDataflows) {
        if (to_string(d) == name) return d;
    }
    throw ParameterError("unknown dataflow '" + std::string(name) + "'");
}

int log2_exact(std::int64_t v) {
    if (!is_pow2(v)) throw ParameterError(std::to_string(v) + " is not a power of two");
    int e = 0;
    while ((std::int64_t{1} << e) < v) ++e;
    return e;
}

ArrayShape::ArrayShape(std::int64_t rows, std::int64_t cols) : rows_(rows), cols_(cols) {
    if (!is_pow2(rows) || !is_pow2(cols)) {
        throw ParameterError("array shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                             " is not a power of two on both sides");
    }
}

ArrayShape ArrayShape::from_exponents(int row_exp, int col_exp) {
    if (row_exp < 0 || col_exp < 0 || row_exp > 30 || col_exp > 30) {
        throw ParameterError("array exponent out of range");
    }
    return {std::int64_t{1} << row_exp, std::int64_t{1} << col_exp};
}

Platform::Platform(std::vector<ComputeUnit> units) : units_(std::move(units)) {
    if (units_.empty()) throw ParameterError("platform needs at least one compute unit");
    for (const auto& u : units_) {
        if (u.count < 1) throw ParameterError("compute unit count must be >= 1");
    }
}

Platform Platform::default_platform() {
    return Platform({
        {1, ArrayShape(128, 128)},
        {1, ArrayShape(32, 32)},
        {1, ArrayShape(256, 16)},
        {1, ArrayShape(16, 256)},
    });
}

void validate(const Schedule& s, std::size_t x) {
    if (s.assignment.size() != x || s.dataflows.size() != x) {
        throw ShapeError("schedule size does not match platform size " + std::to_string(x));
    }
    std::vector<bool> seen(x, false);
    for (int a : s.assignment) {
        if (a < 0 || static_cast<std::size_t>(a) >= x || seen[static_cast<std::size_t>(a)]) {
            throw ShapeError("schedule assignment is not a permutation");
        }
        seen[static_cast<std::size_t>(a)] = true;
    }
}

}  // namespace sysdse
