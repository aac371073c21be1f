#pragma once

// Allocation-free forward/backward kernels shared by inference, gradient
// evaluation and the training loop. Not part of the public interface.

#include <span>
#include <vector>

#include "sysdse/model.hpp"

namespace sysdse::detail {

struct Workspace {
    std::vector<double> x;       ///< MLP input
    std::vector<double> hidden;  ///< post-ReLU activations
    std::vector<double> probs;
    std::vector<double> dhidden;
    std::vector<double> dx;

    void resize(const ModelSpec& spec);
};

/// Throws on arity mismatch or an out-of-vocabulary bucket id.
void check_input(const RecommenderModel& model, const ModelInput& input);

/// Fills ws.x, ws.hidden and ws.probs. Input must already be checked.
void forward_into(const RecommenderModel& model, const ModelInput& input, Workspace& ws);

/// Runs forward, adds weight * d(-ln p[label]) to `grads` and returns the
/// unweighted sample loss.
double backward_accumulate(const RecommenderModel& model, const ModelInput& input, LabelId label, Workspace& ws,
                           Parameters& grads, double weight);

LabelId argmax(std::span<const double> probs);

}  // namespace sysdse::detail
