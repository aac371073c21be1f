#include <algorithm>
#include <cmath>
#include <numeric>

#include "model_kernels.hpp"
#include "sysdse/model.hpp"
#include "sysdse/rng.hpp"

namespace sysdse {

void TrainConfig::validate() const {
    if (epochs < 1) throw ParameterError("epochs must be >= 1");
    if (batch_size < 1) throw ParameterError("batch size must be >= 1");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw ParameterError("validation fraction must lie in (0, 1)");
    }
    if (!(learning_rate > 0.0)) throw ParameterError("learning rate must be > 0");
}

namespace {

class Adam {
public:
    Adam(const Parameters& like, const TrainConfig& cfg)
        : m_(like.zeros_like()), v_(like.zeros_like()), cfg_(cfg) {}

    void step(Parameters& params, const Parameters& grads) {
        ++t_;
        const double c1 = 1.0 - std::pow(cfg_.adam_beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(cfg_.adam_beta2, static_cast<double>(t_));
        const double lr = cfg_.learning_rate * std::sqrt(c2) / c1;
        const double b1 = cfg_.adam_beta1;
        const double b2 = cfg_.adam_beta2;
        const double eps_hat = cfg_.adam_eps * std::sqrt(c2);

        std::vector<std::vector<double>*> ps, ms, vs;
        std::vector<const std::vector<double>*> gs;
        params.for_each([&](const std::string&, std::vector<double>& t) { ps.push_back(&t); });
        m_.for_each([&](const std::string&, std::vector<double>& t) { ms.push_back(&t); });
        v_.for_each([&](const std::string&, std::vector<double>& t) { vs.push_back(&t); });
        grads.for_each([&](const std::string&, const std::vector<double>& t) { gs.push_back(&t); });

        for (std::size_t k = 0; k < ps.size(); ++k) {
            double* p = ps[k]->data();
            double* m = ms[k]->data();
            double* v = vs[k]->data();
            const double* g = gs[k]->data();
            const std::size_t n = ps[k]->size();
            for (std::size_t i = 0; i < n; ++i) {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                p[i] -= lr * m[i] / (std::sqrt(v[i]) + eps_hat);
            }
        }
    }

private:
    Parameters m_;
    Parameters v_;
    TrainConfig cfg_;
    std::uint64_t t_ = 0;
};

void zero(Parameters& g) {
    g.for_each([](const std::string&, std::vector<double>& t) { std::fill(t.begin(), t.end(), 0.0); });
}

void fit_standardizer(RecommenderModel& model, const Dataset& ds, std::span<const std::size_t> rows) {
    const std::size_t arity = model.spec.arity();
    std::vector<double> mean(arity, 0.0);
    std::vector<double> sq(arity, 0.0);
    for (auto r : rows) {
        for (std::size_t f = 0; f < arity; ++f) mean[f] += static_cast<double>(ds.records[r].features[f]);
    }
    for (auto& m : mean) m /= static_cast<double>(rows.size());
    for (auto r : rows) {
        for (std::size_t f = 0; f < arity; ++f) {
            const double d = static_cast<double>(ds.records[r].features[f]) - mean[f];
            sq[f] += d * d;
        }
    }
    model.input_mean = mean;
    model.input_scale.resize(arity);
    for (std::size_t f = 0; f < arity; ++f) {
        const double sd = std::sqrt(sq[f] / static_cast<double>(rows.size()));
        model.input_scale[f] = sd > 0.0 ? sd : 1.0;
    }
}

}  // namespace

TrainReport train(RecommenderModel& model, const Dataset& dataset, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
    cfg.validate();
    const auto& spec = model.spec;
    if (dataset.records.size() < 2) throw ShapeError("training needs at least two records");
    if (!dataset.columns.empty() && !spec.encoder.names.empty() && dataset.columns != spec.encoder.names) {
        throw ShapeError("dataset columns do not match the model's feature schema");
    }
    for (const auto& r : dataset.records) {
        if (r.features.size() != spec.arity()) throw ShapeError("dataset arity does not match the model");
        if (r.label >= spec.num_classes) throw ShapeError("dataset label outside the model's class range");
    }

    const std::size_t n = dataset.records.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(derive_seed(cfg.seed, 0));
    split_rng.shuffle(order);
    const auto val_count = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(n))), 1, n - 1);
    const std::vector<std::size_t> val_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(val_count));
    std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(val_count), order.end());

    if (spec.baseline_mode) fit_standardizer(model, dataset, train_rows);

    std::vector<ModelInput> inputs;
    inputs.reserve(n);
    for (const auto& r : dataset.records) inputs.push_back(prepare_input(model, r.features));

    detail::Workspace ws;
    ws.resize(spec);
    Parameters grads = model.params.zeros_like();
    Adam adam(model.params, cfg);

    TrainReport report;
    report.train_count = train_rows.size();
    report.val_count = val_rows.size();
    {
        double total = 0.0;
        for (auto r : train_rows) {
            detail::forward_into(model, inputs[r], ws);
            total += -std::log(std::max(ws.probs[dataset.records[r].label], 1e-300));
        }
        report.initial_loss = total / static_cast<double>(train_rows.size());
    }

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng epoch_rng(derive_seed(cfg.seed, epoch));
        epoch_rng.shuffle(train_rows);

        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < train_rows.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(train_rows.size(), start + cfg.batch_size);
            const double weight = 1.0 / static_cast<double>(end - start);
            zero(grads);
            for (std::size_t b = start; b < end; ++b) {
                const auto r = train_rows[b];
                const LabelId label = dataset.records[r].label;
                loss_sum += detail::backward_accumulate(model, inputs[r], label, ws, grads, weight);
                if (detail::argmax(ws.probs) == label) ++correct;
            }
            adam.step(model.params, grads);
        }

        std::size_t val_correct = 0;
        for (auto r : val_rows) {
            detail::forward_into(model, inputs[r], ws);
            if (detail::argmax(ws.probs) == dataset.records[r].label) ++val_correct;
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(train_rows.size());
        stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_rows.size());
        stats.val_accuracy = static_cast<double>(val_correct) / static_cast<double>(val_rows.size());
        report.epochs.push_back(stats);
        if (on_epoch) on_epoch(stats);
    }
    return report;
}

}  // namespace sysdse
