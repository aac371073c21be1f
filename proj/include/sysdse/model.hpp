#pragma once

// Embedding + MLP recommender over a label space.
//
//   raw features --encode--> bucket ids --lookup--> concat(embeddings)
//     --> hidden affine + ReLU --> output affine --> softmax over labels
//
// In baseline mode the embedding stage is skipped and the z-scored raw
// features feed the MLP directly. Everything is double precision.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sysdse/data.hpp"
#include "sysdse/encoder.hpp"

namespace sysdse {

struct ModelSpec {
    EncoderSpec encoder;
    std::size_t embedding_dim = 16;
    std::size_t hidden_units = 256;
    std::size_t num_classes = 2;
    bool baseline_mode = false;

    std::size_t arity() const { return encoder.arity(); }
    /// Width of the MLP input vector.
    std::size_t input_dim() const { return baseline_mode ? arity() : arity() * embedding_dim; }

    /// Throws ParameterError on inconsistent dimensions.
    void validate() const;
};

/// Trainable tensors. Also used for gradients and optimizer moments.
struct Parameters {
    std::vector<std::vector<double>> embeddings;  ///< per feature, vocab x embedding_dim, row major
    std::vector<double> hidden_w;                 ///< hidden_units x input_dim
    std::vector<double> hidden_b;
    std::vector<double> output_w;                 ///< num_classes x hidden_units
    std::vector<double> output_b;

    /// Same shapes, all zeros.
    Parameters zeros_like() const;

    /// Visits every tensor in checkpoint order as fn(name, std::vector<double>&).
    template <class Fn>
    void for_each(Fn&& fn) {
        for (std::size_t i = 0; i < embeddings.size(); ++i) fn("embedding." + std::to_string(i), embeddings[i]);
        fn(std::string("hidden.weight"), hidden_w);
        fn(std::string("hidden.bias"), hidden_b);
        fn(std::string("output.weight"), output_w);
        fn(std::string("output.bias"), output_b);
    }
    template <class Fn>
    void for_each(Fn&& fn) const {
        const_cast<Parameters*>(this)->for_each([&](const std::string& n, std::vector<double>& t) {
            fn(n, static_cast<const std::vector<double>&>(t));
        });
    }
};

struct RecommenderModel {
    ModelSpec spec;
    Parameters params;
    std::vector<double> input_mean;   ///< baseline z-score statistics, empty otherwise
    std::vector<double> input_scale;
    nlohmann::json label_space;       ///< {"case": int, "params": {...}} of the label table
};

/// Encoded form of one query: bucket ids, or standardized values in
/// baseline mode.
struct ModelInput {
    std::vector<std::uint32_t> ids;
    std::vector<double> values;
};

struct Example {
    ModelInput input;
    LabelId label = 0;
};

/// Glorot-uniform dense weights, U(-0.05, 0.05) embeddings, zero biases.
RecommenderModel init_model(const ModelSpec& spec, std::uint64_t seed);

/// Encodes (or standardizes, in baseline mode) one raw feature row.
ModelInput prepare_input(const RecommenderModel& model, std::span<const std::int64_t> raw);

/// Class probabilities. Throws EncodingError on an out-of-vocabulary id.
std::vector<double> forward(const RecommenderModel& model, const ModelInput& input);

struct LossAndGrad {
    double loss = 0.0;  ///< mean cross-entropy over the batch
    Parameters grads;
};

LossAndGrad loss_and_grad(const RecommenderModel& model, std::span<const Example> batch);

/// Argmax of forward(); ties go to the smallest class id.
LabelId predict(const RecommenderModel& model, std::span<const std::int64_t> raw);
LabelId predict(const RecommenderModel& model, const ModelInput& input);

struct TrainConfig {
    std::size_t epochs = 15;
    std::size_t batch_size = 256;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;  ///< 1-based
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_accuracy = 0.0;
};

struct TrainReport {
    double initial_loss = 0.0;  ///< training-set loss before the first update
    std::vector<EpochStats> epochs;
    std::size_t train_count = 0;
    std::size_t val_count = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Seeded split (validation = first fraction of a shuffled index list),
/// per-epoch reshuffle and Adam updates per mini-batch. In baseline mode the
/// z-score statistics are fitted on the training split first.
TrainReport train(RecommenderModel& model, const Dataset& dataset, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// Checkpoint: one line of JSON header (format version, spec, label space,
// tensor names and shapes in order), then the tensors as little-endian
// IEEE-754 doubles concatenated in the declared order.
inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const RecommenderModel& model, const std::filesystem::path& path);
std::string checkpoint_bytes(const RecommenderModel& model);
RecommenderModel load_checkpoint(const std::filesystem::path& path);
RecommenderModel checkpoint_from_bytes(const std::string& bytes);

}  // namespace sysdse
