#include "sysdse/encoder.hpp"

#include <algorithm>
#include <cmath>

namespace sysdse {

FeatureEncoding FeatureEncoding::log_bucket(std::int64_t vmax, std::uint32_t buckets) {
    if (vmax < 1 || buckets < 2) throw ParameterError("log bucket needs vmax >= 1 and at least 2 buckets");
    return {EncodeRule::LogBucket, vmax, buckets};
}

FeatureEncoding FeatureEncoding::offset(std::int64_t min, std::uint32_t vocab) {
    if (vocab < 2) throw ParameterError("offset encoding needs a vocabulary of at least 2");
    return {EncodeRule::Offset, min, vocab};
}

FeatureEncoding FeatureEncoding::pow2_offset(int min_exp, std::uint32_t vocab) {
    if (vocab < 2 || min_exp < 0) throw ParameterError("pow2 offset encoding needs min_exp >= 0 and vocab >= 2");
    return {EncodeRule::Pow2Offset, min_exp, vocab};
}

std::uint32_t FeatureEncoding::encode(std::int64_t v) const {
    switch (rule) {
        case EncodeRule::LogBucket: {
            if (v < 1 || v > bound) {
                throw EncodingError("value " + std::to_string(v) + " outside [1, " + std::to_string(bound) + "]");
            }
            const double scaled = vocab * std::log(static_cast<double>(v)) / std::log(static_cast<double>(bound) + 1.0);
            return std::min(vocab - 1, static_cast<std::uint32_t>(scaled));
        }
        case EncodeRule::Offset: {
            if (v < bound || v - bound >= vocab) {
                throw EncodingError("value " + std::to_string(v) + " outside [" + std::to_string(bound) + ", " +
                                    std::to_string(bound + vocab - 1) + "]");
            }
            return static_cast<std::uint32_t>(v - bound);
        }
        case EncodeRule::Pow2Offset: {
            if (!is_pow2(v)) throw EncodingError("value " + std::to_string(v) + " is not a power of two");
            const int e = log2_exact(v);
            if (e < bound || e - bound >= vocab) {
                throw EncodingError("exponent of " + std::to_string(v) + " outside [" + std::to_string(bound) + ", " +
                                    std::to_string(bound + vocab - 1) + "]");
            }
            return static_cast<std::uint32_t>(e - bound);
        }
    }
    throw EncodingError("unknown encoding rule");
}

std::vector<std::uint32_t> encode(std::span<const std::int64_t> raw, const EncoderSpec& spec) {
    if (raw.size() != spec.arity()) {
        throw EncodingError("expected " + std::to_string(spec.arity()) + " features, got " + std::to_string(raw.size()));
    }
    std::vector<std::uint32_t> ids(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        try {
            ids[i] = spec.features[i].encode(raw[i]);
        } catch (const EncodingError& e) {
            const std::string name = i < spec.names.size() ? spec.names[i] : std::to_string(i);
            throw EncodingError("feature '" + name + "': " + e.what());
        }
    }
    return ids;
}

EncoderSpec default_encoder(const AnyTable& table, const GenParams& p, std::uint32_t log_buckets) {
    EncoderSpec spec;
    spec.names = schema_for(table).columns;
    const auto dims = [&] {
        spec.features.push_back(FeatureEncoding::log_bucket(p.ranges.m_max, log_buckets));
        spec.features.push_back(FeatureEncoding::log_bucket(p.ranges.n_max, log_buckets));
        spec.features.push_back(FeatureEncoding::log_bucket(p.ranges.k_max, log_buckets));
    };
    switch (case_id(table)) {
        case 1: {
            dims();
            const auto vocab = static_cast<std::uint32_t>(std::max(2, p.mac_exp_max - p.mac_exp_min + 1));
            spec.features.push_back(FeatureEncoding::offset(p.mac_exp_min, vocab));
            break;
        }
        case 2: {
            dims();
            const auto& a = p.array_space;
            const auto vocab = static_cast<std::uint32_t>(std::max(2, a.max_mac_exp - 2 * a.min_exp + 1));
            spec.features.push_back(FeatureEncoding::pow2_offset(a.min_exp, vocab));
            spec.features.push_back(FeatureEncoding::pow2_offset(a.min_exp, vocab));
            spec.features.push_back(FeatureEncoding::offset(0, kNumDataflows));
            spec.features.push_back(FeatureEncoding::log_bucket(p.bw_max, log_buckets));
            spec.features.push_back(FeatureEncoding::log_bucket(p.budget_max_kb, log_buckets));
            break;
        }
        default: {
            const auto units = std::get<Case3Table>(table).params().platform.size();
            for (std::size_t i = 0; i < units; ++i) dims();
            break;
        }
    }
    return spec;
}

namespace {

std::string_view rule_name(EncodeRule r) {
    switch (r) {
        case EncodeRule::LogBucket: return "log_bucket";
        case EncodeRule::Offset: return "offset";
        case EncodeRule::Pow2Offset: return "pow2_offset";
    }
    return "?";
}

EncodeRule parse_rule(const std::string& s) {
    for (auto r : {EncodeRule::LogBucket, EncodeRule::Offset, EncodeRule::Pow2Offset}) {
        if (rule_name(r) == s) return r;
    }
    throw CheckpointError("unknown encoding rule '" + s + "'");
}

}  // namespace

nlohmann::json to_json(const EncoderSpec& spec) {
    nlohmann::json feats = nlohmann::json::array();
    for (std::size_t i = 0; i < spec.features.size(); ++i) {
        const auto& f = spec.features[i];
        feats.push_back({{"name", i < spec.names.size() ? spec.names[i] : std::to_string(i)},
                         {"rule", rule_name(f.rule)},
                         {"bound", f.bound},
                         {"vocab", f.vocab}});
    }
    return feats;
}

EncoderSpec encoder_from_json(const nlohmann::json& j) {
    EncoderSpec spec;
    try {
        for (const auto& f : j) {
            spec.names.push_back(f.at("name").get<std::string>());
            FeatureEncoding enc{parse_rule(f.at("rule").get<std::string>()), f.at("bound").get<std::int64_t>(),
                                f.at("vocab").get<std::uint32_t>()};
            if (enc.vocab < 2) throw CheckpointError("encoder vocabulary must be >= 2");
            spec.features.push_back(enc);
        }
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("malformed encoder spec: ") + e.what());
    }
    return spec;
}

}  // namespace sysdse
