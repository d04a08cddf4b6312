#include "hyperode/nn/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hyperode/error.hpp"

namespace hyperode::nn {

void optimizer_step(OptimizerState& state, Mlp& net, const Gradients& grads) {
    if (!(grads.layout() == net.layout())) throw DimensionError("gradient shape differs from network");
    const auto g = grads.values();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!std::isfinite(g[i]))
            throw NumericError("non-finite gradient entry at parameter " + std::to_string(i));

    auto params = net.params();
    if (state.first_moment.size() != params.size()) {
        if (state.step_count != 0) throw DimensionError("optimizer state belongs to a different network");
        state.first_moment.assign(params.size(), 0.0);
        state.second_moment.assign(params.size(), 0.0);
    }

    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(state.beta1, t);
    const double correction2 = 1.0 - std::pow(state.beta2, t);
    const double decay = state.kind == OptimizerKind::adamw ? 1.0 - state.lr * state.weight_decay : 1.0;

    for (std::size_t i = 0; i < params.size(); ++i) {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = state.beta1 * m + (1.0 - state.beta1) * g[i];
        v = state.beta2 * v + (1.0 - state.beta2) * g[i] * g[i];
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        params[i] = params[i] * decay - state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

double cosine_lr(const CosineSchedule& schedule, std::size_t step) {
    if (schedule.total_steps == 0) throw RangeError("cosine schedule needs total_steps >= 1");
    if (step > schedule.total_steps)
        throw RangeError("schedule step " + std::to_string(step) + " beyond total " +
                         std::to_string(schedule.total_steps));
    if (step == 0) return schedule.lr_max;
    if (step == schedule.total_steps) return schedule.lr_min;
    const double phase = std::numbers::pi * static_cast<double>(step) / static_cast<double>(schedule.total_steps);
    return schedule.lr_min + 0.5 * (schedule.lr_max - schedule.lr_min) * (1.0 + std::cos(phase));
}

} // namespace hyperode::nn
