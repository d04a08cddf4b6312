#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hyperode/hyper/train.hpp"
#include "hyperode/nn/mlp.hpp"
#include "hyperode/ode/vector_field.hpp"

namespace hyperode::problems {

// Axis-aligned box the initial conditions are drawn from.
struct Box {
    Vector lo;
    Vector hi;
};

// Uniform sample in `box`, deterministic per seed.
Vector sample_box(const Box& box, std::uint64_t seed);

// Immutable test problem. Clone `field` before counting NFEs in parallel.
struct ProblemSpec {
    std::string name;
    std::size_t dim = 0;
    VectorField field;
    Box ic_box;
    Span span_default{0.0, 1.0};
    // Multiply-accumulates per dynamics evaluation.
    std::size_t mac_f = 0;
    // Network behind the field for random-MLP problems.
    std::shared_ptr<const nn::Mlp> network;

    bool has_exact() const noexcept { return field.has_exact(); }
    Vector sample_ic(std::uint64_t seed) const { return sample_box(ic_box, seed); }
    TrainingProblem training_problem() const;
};

// z' = Lambda z; exact flow exp(s Lambda) z0 by scaling-and-squaring.
// IC box [-1, 1]^n.
ProblemSpec problem_linear(const std::vector<Vector>& lambda, std::string name = "linear");

// Van der Pol: z1' = z2, z2' = mu (1 - z1^2) z2 - z1. No exact flow. IC box [-2, 2]^2.
ProblemSpec problem_vdp(double mu);

// tanh MLP [dim -> hidden -> dim] with seeded weights and biases, output layer
// rescaled once so the largest ||f|| over 1024 probe points of the IC box
// [-1, 1]^dim is 1.
ProblemSpec problem_random_mlp(std::size_t dim, std::size_t hidden, std::uint64_t seed);

inline constexpr std::size_t kRandomMlpHidden = 32;

// "linear1", "rotation2", "vdp1" or "mlp-d{dim}-s{seed}". Throws RangeError otherwise.
ProblemSpec problem_by_name(std::string_view name);

} // namespace hyperode::problems
