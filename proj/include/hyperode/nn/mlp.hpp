#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hyperode/types.hpp"

namespace hyperode::nn {

// Hidden-layer nonlinearity. The output layer is always affine.
enum class Activation { tanh, softplus, prelu };

std::string_view to_string(Activation act) noexcept;
Activation parse_activation(std::string_view name);

inline constexpr double kPreluSlopeInit = 0.25;

// Offsets of one dense layer inside the flat parameter vector.
// The weight block is row-major [out x in].
struct LayerShape {
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
};

// Shape of an MLP's parameters: [W0, b0, W1, b1, ..., prelu slopes].
class ParamLayout {
public:
    ParamLayout(std::vector<std::size_t> dims, Activation act);

    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    Activation activation() const noexcept { return activation_; }
    const std::vector<LayerShape>& layers() const noexcept { return layers_; }
    std::size_t hidden_layers() const noexcept { return layers_.size() - 1; }
    std::size_t input_dim() const noexcept { return dims_.front(); }
    std::size_t output_dim() const noexcept { return dims_.back(); }
    // Total number of scalar parameters.
    std::size_t size() const noexcept { return size_; }
    // Position of the prelu slope of hidden layer `h`; only valid for prelu nets.
    std::size_t slope_offset(std::size_t h) const noexcept { return slopes_offset_ + h; }
    bool has_slopes() const noexcept { return activation_ == Activation::prelu; }

    bool operator==(const ParamLayout& other) const noexcept {
        return dims_ == other.dims_ && activation_ == other.activation_;
    }

private:
    std::vector<std::size_t> dims_;
    Activation activation_;
    std::vector<LayerShape> layers_;
    std::size_t slopes_offset_ = 0;
    std::size_t size_ = 0;
};

// Parameter-shaped buffer. Used for gradients and optimizer moments.
class Gradients {
public:
    explicit Gradients(ParamLayout layout);

    const ParamLayout& layout() const noexcept { return layout_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    std::span<double> weight(std::size_t layer);
    std::span<const double> weight(std::size_t layer) const;
    std::span<double> bias(std::size_t layer);
    std::span<const double> bias(std::size_t layer) const;
    double& slope(std::size_t hidden);
    double slope(std::size_t hidden) const;

    Gradients& operator+=(const Gradients& other);
    Gradients& operator*=(double factor) noexcept;
    void zero() noexcept;
    double norm() const noexcept;

private:
    ParamLayout layout_;
    std::vector<double> values_;
};

// Intermediate values from one forward pass, consumed by the backward pass.
struct Tape {
    std::vector<Vector> inputs;  // input of each layer
    std::vector<Vector> pre;     // pre-activation of each layer
};

// Dense feed-forward network. Evaluation is const and thread-safe.
class Mlp {
public:
    // Glorot-uniform weights, zero biases, prelu slopes at kPreluSlopeInit.
    static Mlp init(const std::vector<std::size_t>& dims, Activation act, std::uint64_t seed);

    Mlp(ParamLayout layout, std::vector<double> params);

    const ParamLayout& layout() const noexcept { return layout_; }
    std::size_t input_dim() const noexcept { return layout_.input_dim(); }
    std::size_t output_dim() const noexcept { return layout_.output_dim(); }

    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }
    std::span<double> weight(std::size_t layer);
    std::span<const double> weight(std::size_t layer) const;
    std::span<double> bias(std::size_t layer);
    std::span<const double> bias(std::size_t layer) const;
    double& slope(std::size_t hidden);
    double slope(std::size_t hidden) const;

    Vector forward(std::span<const double> input) const;
    Vector forward(std::span<const double> input, Tape& tape) const;

    // Gradient of <upstream, forward(input)> with respect to every parameter.
    Gradients backward(std::span<const double> input, std::span<const double> upstream) const;

    // Adds the parameter gradient of <upstream, output> into `into`. When
    // `input_grad` is non-empty it receives the gradient w.r.t. the input.
    void accumulate_backward(const Tape& tape, std::span<const double> upstream, Gradients& into,
                             std::span<double> input_grad = {}) const;

    // Multiply-accumulate operations per evaluation (sum of out*in over layers).
    std::size_t mac_count() const noexcept;

private:
    void check_input(std::span<const double> input) const;

    ParamLayout layout_;
    std::vector<double> params_;
};

} // namespace hyperode::nn
