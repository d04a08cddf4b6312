#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hyperode/nn/mlp.hpp"
#include "hyperode/ode/vector_field.hpp"
#include "hyperode/random.hpp"

namespace hyperode::testing {

inline Vector random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vector v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

// Random architecture and parameters, including nonzero biases and slopes.
inline nn::Mlp random_net(Rng& rng, nn::Activation act) {
    std::uniform_int_distribution<std::size_t> width(1, 6), depth(1, 3);
    std::vector<std::size_t> dims{width(rng)};
    for (std::size_t i = 0, n = depth(rng); i < n; ++i) dims.push_back(width(rng));
    dims.push_back(width(rng));
    nn::Mlp net = nn::Mlp::init(dims, act, rng());
    for (auto& p : net.params()) p = random_vector(rng, 1, 0.9)[0];
    return net;
}

// Relative error ||a - b|| / max(||b||, floor) between a gradient and a reference.
inline double relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-8) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        ref += b[i] * b[i];
    }
    return std::sqrt(diff) / std::max(std::sqrt(ref), floor);
}

// Central differences of a scalar function of a parameter vector, in place.
template <typename Fn>
Vector central_differences(std::span<double> params, Fn&& loss, double h = 1e-6) {
    Vector grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double up = loss();
        params[i] = keep - h;
        const double down = loss();
        params[i] = keep;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// z' = z with exact flow e^s z0.
inline VectorField exponential_field() {
    return VectorField(
        1, [](double, std::span<const double> z) { return Vector{z[0]}; },
        [](double s, std::span<const double> z0) { return Vector{std::exp(s) * z0[0]}; });
}

} // namespace hyperode::testing
