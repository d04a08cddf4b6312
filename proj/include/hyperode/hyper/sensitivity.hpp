#pragma once

#include <span>
#include <vector>

#include "hyperode/nn/mlp.hpp"

namespace hyperode {

// Gradient of (1/N) sum_i 0.5 ||net(x_i) - y_i||^2.
nn::Gradients regression_gradient(const nn::Mlp& net, std::span<const Vector> inputs, std::span<const Vector> targets);

struct SensitivityRow {
    double eta = 0.0;
    // sup over probes of ||f_{theta - eta d}(z) - f_theta(z)||_2
    double measured = 0.0;
    // ||theta_{t+1} - theta_t||_2 = eta ||d||_2
    double step_norm = 0.0;
    // measured / step_norm: empirical lower bound on the Lipschitz constant in theta.
    double lipschitz_lower = 0.0;
};

// Applies theta <- theta - eta * direction for every eta (each from the same
// starting point) and measures the change of the dynamics network on `probes`.
std::vector<SensitivityRow> param_sensitivity(const nn::Mlp& dynamics, std::span<const Vector> probes,
                                              const nn::Gradients& direction, std::span<const double> etas);

} // namespace hyperode
