#include "sysdse/model.hpp"

#include <algorithm>
#include <cmath>

#include "model_kernels.hpp"
#include "sysdse/rng.hpp"

namespace sysdse {

void ModelSpec::validate() const {
    if (num_classes < 2) throw ParameterError("num_classes must be >= 2");
    if (hidden_units < 1 || embedding_dim < 1) throw ParameterError("model dimensions must be >= 1");
    if (arity() < 1) throw ParameterError("model needs at least one input feature");
    for (const auto& f : encoder.features) {
        if (f.vocab < 2) throw ParameterError("encoder vocabulary must be >= 2");
    }
}

Parameters Parameters::zeros_like() const {
    Parameters z;
    z.embeddings.reserve(embeddings.size());
    for (const auto& e : embeddings) z.embeddings.emplace_back(e.size(), 0.0);
    z.hidden_w.assign(hidden_w.size(), 0.0);
    z.hidden_b.assign(hidden_b.size(), 0.0);
    z.output_w.assign(output_w.size(), 0.0);
    z.output_b.assign(output_b.size(), 0.0);
    return z;
}

RecommenderModel init_model(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    RecommenderModel model;
    model.spec = spec;
    Rng rng(seed);
    auto& p = model.params;

    if (!spec.baseline_mode) {
        for (const auto& f : spec.encoder.features) {
            std::vector<double> table(static_cast<std::size_t>(f.vocab) * spec.embedding_dim);
            for (auto& v : table) v = rng.uniform_real(-0.05, 0.05);
            p.embeddings.push_back(std::move(table));
        }
    } else {
        model.input_mean.assign(spec.arity(), 0.0);
        model.input_scale.assign(spec.arity(), 1.0);
    }

    const auto glorot = [&](std::vector<double>& w, std::size_t fan_in, std::size_t fan_out) {
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        w.resize(fan_in * fan_out);
        for (auto& v : w) v = rng.uniform_real(-bound, bound);
    };
    glorot(p.hidden_w, spec.input_dim(), spec.hidden_units);
    glorot(p.output_w, spec.hidden_units, spec.num_classes);
    p.hidden_b.assign(spec.hidden_units, 0.0);
    p.output_b.assign(spec.num_classes, 0.0);
    return model;
}

ModelInput prepare_input(const RecommenderModel& model, std::span<const std::int64_t> raw) {
    ModelInput in;
    if (!model.spec.baseline_mode) {
        in.ids = encode(raw, model.spec.encoder);
        return in;
    }
    if (raw.size() != model.spec.arity()) {
        throw EncodingError("expected " + std::to_string(model.spec.arity()) + " features, got " +
                            std::to_string(raw.size()));
    }
    in.values.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        in.values[i] = (static_cast<double>(raw[i]) - model.input_mean[i]) / model.input_scale[i];
    }
    return in;
}

namespace detail {

void check_input(const RecommenderModel& model, const ModelInput& input) {
    const auto& spec = model.spec;
    if (spec.baseline_mode) {
        if (input.values.size() != spec.arity()) throw ShapeError("baseline input has the wrong arity");
        return;
    }
    if (input.ids.size() != spec.arity()) throw ShapeError("encoded input has the wrong arity");
    for (std::size_t f = 0; f < input.ids.size(); ++f) {
        if (input.ids[f] >= spec.encoder.features[f].vocab) {
            throw EncodingError("bucket id " + std::to_string(input.ids[f]) + " >= vocabulary " +
                                std::to_string(spec.encoder.features[f].vocab) + " for feature " + std::to_string(f));
        }
    }
}

void Workspace::resize(const ModelSpec& spec) {
    x.resize(spec.input_dim());
    hidden.resize(spec.hidden_units);
    probs.resize(spec.num_classes);
    dhidden.resize(spec.hidden_units);
    dx.resize(spec.input_dim());
}

void forward_into(const RecommenderModel& model, const ModelInput& input, Workspace& ws) {
    const auto& spec = model.spec;
    const auto& p = model.params;
    const std::size_t in_dim = spec.input_dim();
    const std::size_t hid = spec.hidden_units;
    const std::size_t classes = spec.num_classes;

    if (spec.baseline_mode) {
        std::copy(input.values.begin(), input.values.end(), ws.x.begin());
    } else {
        const std::size_t dim = spec.embedding_dim;
        for (std::size_t f = 0; f < input.ids.size(); ++f) {
            const double* row = p.embeddings[f].data() + static_cast<std::size_t>(input.ids[f]) * dim;
            std::copy(row, row + dim, ws.x.begin() + static_cast<std::ptrdiff_t>(f * dim));
        }
    }

    for (std::size_t j = 0; j < hid; ++j) {
        const double* w = p.hidden_w.data() + j * in_dim;
        double acc = p.hidden_b[j];
        for (std::size_t i = 0; i < in_dim; ++i) acc += w[i] * ws.x[i];
        ws.hidden[j] = acc > 0.0 ? acc : 0.0;
    }

    double max_logit = -INFINITY;
    for (std::size_t c = 0; c < classes; ++c) {
        const double* w = p.output_w.data() + c * hid;
        double acc = p.output_b[c];
        for (std::size_t j = 0; j < hid; ++j) acc += w[j] * ws.hidden[j];
        ws.probs[c] = acc;
        max_logit = std::max(max_logit, acc);
    }
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        ws.probs[c] = std::exp(ws.probs[c] - max_logit);
        total += ws.probs[c];
    }
    const double inv = 1.0 / total;
    for (std::size_t c = 0; c < classes; ++c) ws.probs[c] *= inv;
}

double backward_accumulate(const RecommenderModel& model, const ModelInput& input, LabelId label, Workspace& ws,
                           Parameters& grads, double weight) {
    const auto& spec = model.spec;
    const auto& p = model.params;
    const std::size_t in_dim = spec.input_dim();
    const std::size_t hid = spec.hidden_units;
    const std::size_t classes = spec.num_classes;

    forward_into(model, input, ws);
    const double loss = -std::log(std::max(ws.probs[label], 1e-300));

    // d(loss)/d(logit_c) = p_c - [c == label], scaled by the batch weight.
    std::fill(ws.dhidden.begin(), ws.dhidden.end(), 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
        const double g = (ws.probs[c] - (c == label ? 1.0 : 0.0)) * weight;
        grads.output_b[c] += g;
        double* gw = grads.output_w.data() + c * hid;
        const double* w = p.output_w.data() + c * hid;
        for (std::size_t j = 0; j < hid; ++j) {
            gw[j] += g * ws.hidden[j];
            ws.dhidden[j] += g * w[j];
        }
    }

    const bool need_dx = !spec.baseline_mode;
    if (need_dx) std::fill(ws.dx.begin(), ws.dx.end(), 0.0);
    for (std::size_t j = 0; j < hid; ++j) {
        if (ws.hidden[j] <= 0.0) continue;  // ReLU gate
        const double g = ws.dhidden[j];
        grads.hidden_b[j] += g;
        double* gw = grads.hidden_w.data() + j * in_dim;
        for (std::size_t i = 0; i < in_dim; ++i) gw[i] += g * ws.x[i];
        if (need_dx) {
            const double* w = p.hidden_w.data() + j * in_dim;
            for (std::size_t i = 0; i < in_dim; ++i) ws.dx[i] += g * w[i];
        }
    }

    if (need_dx) {
        const std::size_t dim = spec.embedding_dim;
        for (std::size_t f = 0; f < input.ids.size(); ++f) {
            double* row = grads.embeddings[f].data() + static_cast<std::size_t>(input.ids[f]) * dim;
            const double* src = ws.dx.data() + f * dim;
            for (std::size_t d = 0; d < dim; ++d) row[d] += src[d];
        }
    }
    return loss;
}

LabelId argmax(std::span<const double> probs) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < probs.size(); ++c) {
        if (probs[c] > probs[best]) best = c;
    }
    return static_cast<LabelId>(best);
}

}  // namespace detail

std::vector<double> forward(const RecommenderModel& model, const ModelInput& input) {
    detail::check_input(model, input);
    detail::Workspace ws;
    ws.resize(model.spec);
    detail::forward_into(model, input, ws);
    return ws.probs;
}

LossAndGrad loss_and_grad(const RecommenderModel& model, std::span<const Example> batch) {
    if (batch.empty()) throw ShapeError("loss_and_grad needs a non-empty batch");
    LossAndGrad out;
    out.grads = model.params.zeros_like();
    detail::Workspace ws;
    ws.resize(model.spec);
    const double weight = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (const auto& ex : batch) {
        detail::check_input(model, ex.input);
        if (ex.label >= model.spec.num_classes) throw ShapeError("label outside the model's class range");
        total += detail::backward_accumulate(model, ex.input, ex.label, ws, out.grads, weight);
    }
    out.loss = total * weight;
    return out;
}

LabelId predict(const RecommenderModel& model, const ModelInput& input) {
    return detail::argmax(forward(model, input));
}

LabelId predict(const RecommenderModel& model, std::span<const std::int64_t> raw) {
    return predict(model, prepare_input(model, raw));
}

}  // namespace sysdse
