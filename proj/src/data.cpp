#include "sysdse/data.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sysdse/parallel.hpp"

namespace sysdse {

GemmWorkload sample_workload(Rng& rng, const SamplingRanges& ranges) {
    if (ranges.m_max < 1 || ranges.n_max < 1 || ranges.k_max < 1) {
        throw ParameterError("sampling ranges must be >= 1");
    }
    GemmWorkload w;
    w.m = rng.uniform_int(1, ranges.m_max);
    w.n = rng.uniform_int(1, ranges.n_max);
    w.k = rng.uniform_int(1, ranges.k_max);
    return w;
}

std::vector<std::string> feature_columns(int case_id, std::size_t units) {
    switch (case_id) {
        case 1: return {"m", "n", "k", "mac_exp"};
        case 2: return {"m", "n", "k", "rows", "cols", "dataflow", "bw", "budget_kb"};
        case 3: {
            std::vector<std::string> cols;
            for (std::size_t i = 0; i < units; ++i) {
                const auto s = std::to_string(i);
                cols.insert(cols.end(), {"m" + s, "n" + s, "k" + s});
            }
            return cols;
        }
        default: throw ParameterError("case id must be 1, 2 or 3");
    }
}

std::vector<std::int64_t> to_features(const Case1Query& q) {
    return {q.workload.m, q.workload.n, q.workload.k, q.mac_exp};
}

std::vector<std::int64_t> to_features(const Case2Query& q) {
    return {q.workload.m,
            q.workload.n,
            q.workload.k,
            q.array.shape.rows(),
            q.array.shape.cols(),
            code(q.array.dataflow),
            q.bandwidth,
            q.budget_kb};
}

std::vector<std::int64_t> to_features(std::span<const GemmWorkload> workloads) {
    std::vector<std::int64_t> f;
    f.reserve(workloads.size() * 3);
    for (const auto& w : workloads) f.insert(f.end(), {w.m, w.n, w.k});
    return f;
}

Case1Query case1_query(std::span<const std::int64_t> f) {
    if (f.size() != 4) throw ShapeError("case 1 rows have 4 features");
    Case1Query q{{f[0], f[1], f[2]}, static_cast<int>(f[3])};
    validate(q.workload);
    return q;
}

Case2Query case2_query(std::span<const std::int64_t> f) {
    if (f.size() != 8) throw ShapeError("case 2 rows have 8 features");
    Case2Query q{{f[0], f[1], f[2]}, {ArrayShape(f[3], f[4]), dataflow_from_code(f[5])}, f[6], f[7]};
    validate(q.workload);
    if (q.bandwidth < 1) throw ParameterError("bandwidth must be >= 1");
    return q;
}

std::vector<GemmWorkload> case3_workloads(std::span<const std::int64_t> f) {
    if (f.empty() || f.size() % 3 != 0) throw ShapeError("case 3 rows have 3 features per workload");
    std::vector<GemmWorkload> ws;
    for (std::size_t i = 0; i < f.size(); i += 3) {
        ws.push_back({f[i], f[i + 1], f[i + 2]});
        validate(ws.back());
    }
    return ws;
}

LabelId label_features(const AnyTable& table, std::span<const std::int64_t> features) {
    return std::visit(
        [&](const auto& tab) -> LabelId {
            using T = std::decay_t<decltype(tab)>;
            if constexpr (std::is_same_v<T, Case1Table>) {
                return oracle_case1(case1_query(features), tab);
            } else if constexpr (std::is_same_v<T, Case2Table>) {
                return oracle_case2(case2_query(features), tab);
            } else {
                const auto ws = case3_workloads(features);
                return oracle_case3(ws, tab.params().platform, tab);
            }
        },
        table);
}

namespace {

constexpr std::size_t kProgressBlock = 10000;

void check_params(const AnyTable& table, const GenParams& p) {
    if (p.ranges.m_max < 1 || p.ranges.n_max < 1 || p.ranges.k_max < 1) {
        throw ParameterError("sampling ranges must be >= 1");
    }
    if (const auto* t1 = std::get_if<Case1Table>(&table)) {
        if (p.mac_exp_min > p.mac_exp_max || p.mac_exp_max > t1->params().max_mac_exp || p.mac_exp_min < 0) {
            throw ParameterError("mac_exp sampling range must lie within the label table bounds");
        }
    }
    if (std::holds_alternative<Case2Table>(table)) {
        if (p.bw_min < 1 || p.bw_max < p.bw_min) throw ParameterError("invalid bandwidth range");
        if (p.budget_step_kb < 1 || p.budget_min_kb < 1 || p.budget_max_kb < p.budget_min_kb ||
            (p.budget_max_kb - p.budget_min_kb) % p.budget_step_kb != 0) {
            throw ParameterError("invalid budget grid");
        }
    }
}

// Draws one feature row for the table's case.
std::vector<std::int64_t> draw_features(const AnyTable& table, const GenParams& p, const Case1Table* arrays,
                                        Rng& rng) {
    switch (case_id(table)) {
        case 1: {
            Case1Query q;
            q.workload = sample_workload(rng, p.ranges);
            q.mac_exp = static_cast<int>(rng.uniform_int(p.mac_exp_min, p.mac_exp_max));
            return to_features(q);
        }
        case 2: {
            Case2Query q{sample_workload(rng, p.ranges), {ArrayShape(1, 1), Dataflow::OS}, 1, 0};
            const auto idx = rng.uniform_int(0, static_cast<std::int64_t>(arrays->size()) - 1);
            q.array = arrays->at(static_cast<LabelId>(idx));
            q.bandwidth = rng.uniform_int(p.bw_min, p.bw_max);
            const auto steps = (p.budget_max_kb - p.budget_min_kb) / p.budget_step_kb;
            q.budget_kb = p.budget_min_kb + p.budget_step_kb * rng.uniform_int(0, steps);
            return to_features(q);
        }
        default: {
            const auto& platform = std::get<Case3Table>(table).params().platform;
            std::vector<GemmWorkload> ws;
            for (std::size_t i = 0; i < platform.size(); ++i) ws.push_back(sample_workload(rng, p.ranges));
            return to_features(ws);
        }
    }
}

}  // namespace

Dataset generate_dataset(const AnyTable& table, std::size_t count, std::uint64_t seed, const GenParams& params,
                         unsigned threads, const ProgressFn& progress) {
    check_params(table, params);
    std::optional<Case1Table> arrays;
    if (case_id(table) == 2) {
        arrays = enumerate_case1_labels(params.array_space.min_exp, params.array_space.max_mac_exp);
    }

    Dataset ds;
    ds.case_id = case_id(table);
    ds.columns = schema_for(table).columns;
    ds.records.resize(count);
    std::vector<std::size_t> skips(count, 0);

    constexpr std::size_t kMaxAttempts = 1000;
    for (std::size_t block = 0; block < count; block += kProgressBlock) {
        const std::size_t end = std::min(count, block + kProgressBlock);
        parallel_for(block, end, threads, [&](std::size_t i) {
            Rng rng(derive_seed(seed, i));
            for (std::size_t attempt = 0;; ++attempt) {
                auto features = draw_features(table, params, arrays ? &*arrays : nullptr, rng);
                try {
                    const LabelId label = label_features(table, features);
                    ds.records[i] = {std::move(features), label};
                    return;
                } catch (const InfeasibleError&) {
                    ++skips[i];
                    if (attempt + 1 >= kMaxAttempts) throw;
                }
            }
        });
        if (progress) progress(end, count);
    }
    for (auto s : skips) ds.skipped += s;
    return ds;
}

CsvSchema schema_for(const AnyTable& table) {
    std::size_t units = 4;
    if (const auto* t3 = std::get_if<Case3Table>(&table)) units = t3->params().platform.size();
    return {case_id(table), feature_columns(case_id(table), units), table_size(table)};
}

std::string to_csv(const Dataset& ds) {
    std::string out;
    for (const auto& c : ds.columns) {
        out += c;
        out += ',';
    }
    out += "label\n";
    out.reserve(out.size() + ds.records.size() * (ds.columns.size() + 1) * 6);
    char buf[32];
    for (const auto& r : ds.records) {
        for (auto v : r.features) {
            auto res = std::to_chars(buf, buf + sizeof buf, v);
            out.append(buf, res.ptr);
            out += ',';
        }
        auto res = std::to_chars(buf, buf + sizeof buf, r.label);
        out.append(buf, res.ptr);
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    const std::string text = to_csv(ds);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw IoError("failed writing " + path.string());
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw IoError("failed reading " + path.string());
    return ss.str();
}

Dataset parse_csv(const std::string& text, const std::vector<std::string>* expected, std::size_t num_labels) {
    Dataset ds;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header = true;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string_view line(text.data() + pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (header) {
            header = false;
            auto names = split_commas(line);
            if (names.empty() || names.back() != "label") throw DataError("header must end with 'label'", line_no);
            names.pop_back();
            for (auto n : names) ds.columns.emplace_back(n);
            if (expected && ds.columns != *expected) {
                std::string want;
                for (const auto& c : *expected) want += c + ",";
                throw DataError("header mismatch, expected '" + want + "label'", line_no);
            }
            continue;
        }
        if (line.empty()) {
            if (pos >= text.size()) break;
            throw DataError("empty row", line_no);
        }
        const auto cells = split_commas(line);
        if (cells.size() != ds.columns.size() + 1) {
            throw DataError("expected " + std::to_string(ds.columns.size() + 1) + " columns, got " +
                                std::to_string(cells.size()),
                            line_no);
        }
        DatasetRecord rec;
        rec.features.reserve(ds.columns.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::int64_t v = 0;
            const auto cell = cells[c];
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
                throw DataError("malformed integer '" + std::string(cell) + "'", line_no);
            }
            if (c + 1 < cells.size()) {
                rec.features.push_back(v);
            } else {
                if (v < 0 || static_cast<std::uint64_t>(v) >= num_labels) {
                    throw DataError("label " + std::to_string(v) + " out of range [0, " + std::to_string(num_labels) + ")",
                                    line_no);
                }
                rec.label = static_cast<LabelId>(v);
            }
        }
        ds.records.push_back(std::move(rec));
    }
    if (header) throw DataError("missing header row", 1);
    return ds;
}

}  // namespace

Dataset read_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    Dataset ds = parse_csv(slurp(path), &schema.columns, schema.num_labels);
    ds.case_id = schema.case_id;
    return ds;
}

Dataset read_csv_any(const std::filesystem::path& path) {
    return parse_csv(slurp(path), nullptr, std::numeric_limits<LabelId>::max());
}

}  // namespace sysdse
