#include "hyperode/hyper/sensitivity.hpp"

#include <algorithm>

#include "hyperode/error.hpp"

namespace hyperode {

nn::Gradients regression_gradient(const nn::Mlp& net, std::span<const Vector> inputs, std::span<const Vector> targets) {
    if (inputs.size() != targets.size() || inputs.empty())
        throw DimensionError("regression needs matching, nonempty inputs and targets");
    nn::Gradients grads(net.layout());
    nn::Tape tape;
    const double weight = 1.0 / static_cast<double>(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        Vector residual = difference(net.forward(inputs[i], tape), targets[i]);
        for (double& r : residual) r *= weight;
        net.accumulate_backward(tape, residual, grads);
    }
    return grads;
}

std::vector<SensitivityRow> param_sensitivity(const nn::Mlp& dynamics, std::span<const Vector> probes,
                                              const nn::Gradients& direction, std::span<const double> etas) {
    if (!(direction.layout() == dynamics.layout())) throw DimensionError("update direction shape differs from network");
    std::vector<Vector> before;
    before.reserve(probes.size());
    for (const auto& z : probes) before.push_back(dynamics.forward(z));

    const double direction_norm = direction.norm();
    std::vector<SensitivityRow> rows;
    rows.reserve(etas.size());
    for (double eta : etas) {
        nn::Mlp moved = dynamics;
        auto params = moved.params();
        const auto d = direction.values();
        for (std::size_t i = 0; i < params.size(); ++i) params[i] -= eta * d[i];

        SensitivityRow row{eta, 0.0, eta * direction_norm, 0.0};
        for (std::size_t p = 0; p < probes.size(); ++p)
            row.measured = std::max(row.measured, norm2(difference(moved.forward(probes[p]), before[p])));
        row.lipschitz_lower = row.step_norm > 0.0 ? row.measured / row.step_norm : 0.0;
        rows.push_back(row);
    }
    return rows;
}

} // namespace hyperode
