#pragma once

// Maps raw integer features onto discrete bucket ids for the embedding
// tables. Magnitude features spanning several decades use logarithmic
// buckets; small enumerable features use a plain offset.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sysdse/data.hpp"

namespace sysdse {

enum class EncodeRule : std::uint8_t {
    LogBucket,   ///< min(B-1, floor(B * ln(v) / ln(vmax + 1))), v in [1, vmax]
    Offset,      ///< v - min, v in [min, min + vocab)
    Pow2Offset,  ///< log2(v) - min, v a power of two
};

struct FeatureEncoding {
    EncodeRule rule = EncodeRule::LogBucket;
    std::int64_t bound = 1;  ///< vmax for LogBucket, min (or min exponent) otherwise
    std::uint32_t vocab = 2;  ///< number of buckets

    static FeatureEncoding log_bucket(std::int64_t vmax, std::uint32_t buckets);
    static FeatureEncoding offset(std::int64_t min, std::uint32_t vocab);
    static FeatureEncoding pow2_offset(int min_exp, std::uint32_t vocab);

    /// Throws EncodingError outside the declared domain.
    std::uint32_t encode(std::int64_t v) const;

    bool operator==(const FeatureEncoding&) const = default;
};

struct EncoderSpec {
    std::vector<std::string> names;
    std::vector<FeatureEncoding> features;

    std::size_t arity() const { return features.size(); }

    bool operator==(const EncoderSpec&) const = default;
};

/// 64 buckets cap case-1 accuracy near 65% (bucket width ~20% of M); 256 do not.
inline constexpr std::uint32_t kDefaultLogBuckets = 256;

std::vector<std::uint32_t> encode(std::span<const std::int64_t> raw, const EncoderSpec& spec);

/// Log buckets for M, N, K, bandwidth and budget; offsets for mac_exp,
/// array exponents and the dataflow code.
EncoderSpec default_encoder(const AnyTable& table, const GenParams& params = {},
                            std::uint32_t log_buckets = kDefaultLogBuckets);

nlohmann::json to_json(const EncoderSpec& spec);
EncoderSpec encoder_from_json(const nlohmann::json& j);

}  // namespace sysdse
