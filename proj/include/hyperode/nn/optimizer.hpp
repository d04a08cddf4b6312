#pragma once

#include <cstddef>
#include <vector>

#include "hyperode/nn/mlp.hpp"

namespace hyperode::nn {

enum class OptimizerKind { adam, adamw };

// Adam / AdamW state. Moment buffers are created lazily on the first step so a
// default-constructed state can be attached to any network.
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::adamw;
    double lr = 1e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    // Decoupled for adamw; ignored for adam.
    double weight_decay = 0.0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::size_t step_count = 0;
};

// One bias-corrected Adam/AdamW update of `net` in place.
// Throws NumericError if any gradient entry is non-finite (net untouched).
void optimizer_step(OptimizerState& state, Mlp& net, const Gradients& grads);

struct CosineSchedule {
    double lr_max = 1e-2;
    double lr_min = 5e-4;
    std::size_t total_steps = 1;
};

// lr_min + (lr_max - lr_min)(1 + cos(pi * step / total)) / 2, exact at both ends.
double cosine_lr(const CosineSchedule& schedule, std::size_t step);

} // namespace hyperode::nn
