#include "sysdse/labels.hpp"

#include <algorithm>
#include <numeric>

namespace sysdse {

Case1Table enumerate_case1_labels(int min_exp, int max_mac_exp) {
    if (min_exp < 1 || 2 * min_exp > max_mac_exp || max_mac_exp > 60) {
        throw ParameterError("case 1 bounds require 1 <= min_exp and 2*min_exp <= max_mac_exp <= 60 (got " +
                             std::to_string(min_exp) + ", " + std::to_string(max_mac_exp) + ")");
    }
    std::vector<ArrayConfig> entries;
    for (int a = min_exp; a + min_exp <= max_mac_exp; ++a) {
        for (int b = min_exp; a + b <= max_mac_exp; ++b) {
            for (Dataflow d : kAllDataflows) {
                entries.push_back({ArrayShape::from_exponents(a, b), d});
            }
        }
    }
    return {1, Case1Params{min_exp, max_mac_exp}, std::move(entries)};
}

Case2Table enumerate_case2_labels(std::int64_t min_kb, std::int64_t max_kb, std::int64_t step_kb) {
    if (min_kb < 1 || max_kb < min_kb || step_kb < 1 || (max_kb - min_kb) % step_kb != 0) {
        throw ParameterError("case 2 grid requires 1 <= min_kb <= max_kb and step_kb dividing the range");
    }
    std::vector<std::int64_t> sizes;
    for (std::int64_t s = min_kb; s <= max_kb; s += step_kb) sizes.push_back(s);

    std::vector<BufferSizes> entries;
    entries.reserve(sizes.size() * sizes.size() * sizes.size());
    for (auto i : sizes) {
        for (auto f : sizes) {
            for (auto o : sizes) entries.push_back({i, f, o});
        }
    }
    return {2, Case2Params{min_kb, max_kb, step_kb}, std::move(entries)};
}

namespace {

std::int64_t pow3(std::size_t x) {
    std::int64_t r = 1;
    for (std::size_t i = 0; i < x; ++i) r *= 3;
    return r;
}

// Rank of a permutation of {0..x-1} in lexicographic order.
std::int64_t permutation_rank(const std::vector<int>& perm) {
    const std::size_t x = perm.size();
    std::int64_t rank = 0;
    std::vector<bool> used(x, false);
    std::int64_t fact = 1;
    for (std::size_t i = 2; i < x; ++i) fact *= static_cast<std::int64_t>(i);
    for (std::size_t i = 0; i < x; ++i) {
        int smaller = 0;
        for (int v = 0; v < perm[i]; ++v) {
            if (!used[static_cast<std::size_t>(v)]) ++smaller;
        }
        rank += smaller * fact;
        used[static_cast<std::size_t>(perm[i])] = true;
        if (x - i - 1 > 0) fact /= static_cast<std::int64_t>(x - i - 1);
    }
    return rank;
}

}  // namespace

Case3Table enumerate_case3_labels(const Platform& platform) {
    const std::size_t x = platform.size();
    if (x > 8) throw ParameterError("case 3 label space is limited to 8 units");
    const std::int64_t tuples = pow3(x);

    std::vector<int> perm(x);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Schedule> entries;
    do {
        for (std::int64_t t = 0; t < tuples; ++t) {
            Schedule s;
            s.assignment = perm;
            s.dataflows.resize(x);
            std::int64_t rest = t;
            for (std::size_t i = 0; i < x; ++i) {
                s.dataflows[i] = dataflow_from_code(rest % 3);
                rest /= 3;
            }
            entries.push_back(std::move(s));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {3, Case3Params{platform}, std::move(entries)};
}

LabelId case3_id(const Schedule& s) {
    const std::size_t x = s.assignment.size();
    validate(s, x);
    std::int64_t digits = 0;
    std::int64_t place = 1;
    for (std::size_t i = 0; i < x; ++i) {
        digits += code(s.dataflows[i]) * place;
        place *= 3;
    }
    return static_cast<LabelId>(permutation_rank(s.assignment) * pow3(x) + digits);
}

int case_id(const AnyTable& t) {
    return std::visit([](const auto& tab) { return tab.case_id(); }, t);
}

std::size_t table_size(const AnyTable& t) {
    return std::visit([](const auto& tab) { return tab.size(); }, t);
}

AnyTable default_table(int case_id) {
    switch (case_id) {
        case 1: return enumerate_case1_labels();
        case 2: return enumerate_case2_labels();
        case 3: return enumerate_case3_labels(Platform::default_platform());
        default: throw ParameterError("case id must be 1, 2 or 3");
    }
}

nlohmann::json to_json(const Platform& p) {
    nlohmann::json units = nlohmann::json::array();
    for (const auto& u : p.units()) {
        units.push_back({{"count", u.count}, {"rows", u.shape.rows()}, {"cols", u.shape.cols()}});
    }
    return {{"units", units}};
}

Platform platform_from_json(const nlohmann::json& j) {
    try {
        std::vector<ComputeUnit> units;
        for (const auto& u : j.at("units")) {
            units.push_back({u.value("count", std::int64_t{1}),
                             ArrayShape(u.at("rows").get<std::int64_t>(), u.at("cols").get<std::int64_t>())});
        }
        return Platform(std::move(units));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed platform JSON: ") + e.what());
    }
}

nlohmann::json params_to_json(const AnyTable& t) {
    return std::visit(
        [](const auto& tab) -> nlohmann::json {
            using T = std::decay_t<decltype(tab)>;
            const auto& p = tab.params();
            if constexpr (std::is_same_v<T, Case1Table>) {
                return {{"min_exp", p.min_exp}, {"max_mac_exp", p.max_mac_exp}};
            } else if constexpr (std::is_same_v<T, Case2Table>) {
                return {{"min_kb", p.min_kb}, {"max_kb", p.max_kb}, {"step_kb", p.step_kb}};
            } else {
                return {{"platform", to_json(p.platform)}};
            }
        },
        t);
}

nlohmann::json entry_to_json(const AnyTable& t, LabelId id) {
    return std::visit(
        [id](const auto& tab) -> nlohmann::json {
            using T = std::decay_t<decltype(tab)>;
            const auto& e = tab.at(id);
            if constexpr (std::is_same_v<T, Case1Table>) {
                return {{"id", id}, {"rows", e.shape.rows()}, {"cols", e.shape.cols()}, {"dataflow", code(e.dataflow)}};
            } else if constexpr (std::is_same_v<T, Case2Table>) {
                return {{"id", id}, {"ifmap_kb", e.ifmap_kb}, {"filter_kb", e.filter_kb}, {"ofmap_kb", e.ofmap_kb}};
            } else {
                std::vector<int> codes;
                for (Dataflow d : e.dataflows) codes.push_back(code(d));
                return {{"id", id}, {"assignment", e.assignment}, {"dataflows", codes}};
            }
        },
        t);
}

nlohmann::json to_json(const AnyTable& t) {
    nlohmann::json entries = nlohmann::json::array();
    const auto n = table_size(t);
    for (std::size_t i = 0; i < n; ++i) entries.push_back(entry_to_json(t, static_cast<LabelId>(i)));
    return {{"case", case_id(t)}, {"params", params_to_json(t)}, {"entries", std::move(entries)}};
}

AnyTable table_from_params(int case_id, const nlohmann::json& params) {
    try {
        switch (case_id) {
            case 1: {
                Case1Params d;
                return enumerate_case1_labels(params.value("min_exp", d.min_exp), params.value("max_mac_exp", d.max_mac_exp));
            }
            case 2: {
                Case2Params d;
                return enumerate_case2_labels(params.value("min_kb", d.min_kb), params.value("max_kb", d.max_kb),
                                              params.value("step_kb", d.step_kb));
            }
            case 3:
                if (params.contains("platform")) {
                    return enumerate_case3_labels(platform_from_json(params.at("platform")));
                }
                return enumerate_case3_labels(Platform::default_platform());
            default:
                throw ParameterError("case id must be 1, 2 or 3");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed label parameters: ") + e.what());
    }
}

AnyTable table_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("case") || !j.contains("params")) {
        throw DataError("label JSON needs 'case' and 'params' members");
    }
    AnyTable t = table_from_params(j.at("case").get<int>(), j.at("params"));
    if (j.contains("entries")) {
        const auto& stored = j.at("entries");
        if (!stored.is_array() || stored.size() != table_size(t)) {
            throw DataError("label JSON entry count does not match its parameters");
        }
        for (std::size_t i = 0; i < stored.size(); ++i) {
            if (stored[i] != entry_to_json(t, static_cast<LabelId>(i))) {
                throw DataError("label JSON entry " + std::to_string(i) + " does not match its parameters");
            }
        }
    }
    return t;
}

std::string describe_entry(const AnyTable& t, LabelId id) {
    return std::visit(
        [id](const auto& tab) -> std::string {
            using T = std::decay_t<decltype(tab)>;
            const auto& e = tab.at(id);
            if constexpr (std::is_same_v<T, Case1Table>) {
                return "rows=" + std::to_string(e.shape.rows()) + " cols=" + std::to_string(e.shape.cols()) +
                       " dataflow=" + std::string(to_string(e.dataflow));
            } else if constexpr (std::is_same_v<T, Case2Table>) {
                return "ifmap_kb=" + std::to_string(e.ifmap_kb) + " filter_kb=" + std::to_string(e.filter_kb) +
                       " ofmap_kb=" + std::to_string(e.ofmap_kb);
            } else {
                std::string out;
                for (std::size_t i = 0; i < e.assignment.size(); ++i) {
                    if (i) out += ' ';
                    out += "w" + std::to_string(i) + "->u" + std::to_string(e.assignment[i]);
                }
                for (std::size_t u = 0; u < e.dataflows.size(); ++u) {
                    out += " u" + std::to_string(u) + "=" + std::string(to_string(e.dataflows[u]));
                }
                return out;
            }
        },
        t);
}

}  // namespace sysdse
