#pragma once

// Central finite-difference check of loss_and_grad on small random models.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sysdse/model.hpp"
#include "sysdse/rng.hpp"

namespace gradcheck {

struct Fixture {
    sysdse::RecommenderModel model;
    std::vector<sysdse::Example> batch;
};

/// ≤ 3 features, vocab ≤ 8, hidden ≤ 16, classes ≤ 10. Every fourth model
/// runs in baseline mode. Biases are randomized so their gradients are
/// exercised away from zero.
inline Fixture random_fixture(std::uint64_t seed) {
    sysdse::Rng rng(seed);
    sysdse::ModelSpec spec;
    const auto arity = static_cast<std::size_t>(rng.uniform_int(1, 3));
    for (std::size_t f = 0; f < arity; ++f) {
        spec.encoder.names.push_back("f" + std::to_string(f));
        spec.encoder.features.push_back(
            sysdse::FeatureEncoding::offset(0, static_cast<std::uint32_t>(rng.uniform_int(2, 8))));
    }
    spec.embedding_dim = static_cast<std::size_t>(rng.uniform_int(1, 4));
    spec.hidden_units = static_cast<std::size_t>(rng.uniform_int(1, 16));
    spec.num_classes = static_cast<std::size_t>(rng.uniform_int(2, 10));
    spec.baseline_mode = seed % 4 == 3;

    Fixture fx{sysdse::init_model(spec, seed), {}};
    // Larger weights than the initializer so the check is not dominated by
    // near-zero gradients.
    fx.model.params.for_each([&](const std::string&, std::vector<double>& t) {
        for (auto& v : t) v = rng.uniform_real(-1.0, 1.0);
    });
    if (spec.baseline_mode) {
        for (std::size_t f = 0; f < arity; ++f) {
            fx.model.input_mean[f] = rng.uniform_real(0.0, 4.0);
            fx.model.input_scale[f] = rng.uniform_real(0.5, 2.0);
        }
    }

    const auto batch = static_cast<std::size_t>(rng.uniform_int(1, 6));
    for (std::size_t b = 0; b < batch; ++b) {
        std::vector<std::int64_t> raw;
        for (const auto& f : spec.encoder.features) raw.push_back(rng.uniform_int(0, f.vocab - 1));
        fx.batch.push_back({sysdse::prepare_input(fx.model, raw),
                            static_cast<sysdse::LabelId>(rng.uniform_int(0, static_cast<std::int64_t>(spec.num_classes) - 1))});
    }
    return fx;
}

struct Result {
    std::size_t checked = 0;
    double worst = 0.0;
    std::string worst_tensor;
};

/// rel = |analytic - numeric| / max(|analytic|, |numeric|, 1e-5); the floor
/// keeps round-off on vanishing gradients from counting as error.
inline Result check(const Fixture& fx, double step = 1e-6) {
    const auto analytic = sysdse::loss_and_grad(fx.model, fx.batch).grads;
    sysdse::RecommenderModel probe = fx.model;

    std::vector<std::vector<double>*> probe_tensors;
    std::vector<std::string> names;
    probe.params.for_each([&](const std::string& n, std::vector<double>& t) {
        probe_tensors.push_back(&t);
        names.push_back(n);
    });
    std::vector<const std::vector<double>*> grad_tensors;
    analytic.for_each([&](const std::string&, const std::vector<double>& t) { grad_tensors.push_back(&t); });

    Result r;
    for (std::size_t ti = 0; ti < probe_tensors.size(); ++ti) {
        auto& t = *probe_tensors[ti];
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double orig = t[i];
            t[i] = orig + step;
            const double up = sysdse::loss_and_grad(probe, fx.batch).loss;
            t[i] = orig - step;
            const double down = sysdse::loss_and_grad(probe, fx.batch).loss;
            t[i] = orig;
            const double numeric = (up - down) / (2 * step);
            const double a = (*grad_tensors[ti])[i];
            const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-5});
            ++r.checked;
            if (rel > r.worst) {
                r.worst = rel;
                r.worst_tensor = names[ti];
            }
        }
    }
    return r;
}

}  // namespace gradcheck
