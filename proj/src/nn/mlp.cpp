#include "hyperode/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hyperode/error.hpp"
#include "hyperode/random.hpp"

namespace hyperode::nn {

namespace {

double activate(Activation act, double x, double slope) {
    switch (act) {
    case Activation::tanh:
        return std::tanh(x);
    case Activation::softplus:
        return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
    case Activation::prelu:
        return x > 0.0 ? x : slope * x;
    }
    return x;
}

double activate_derivative(Activation act, double x, double slope) {
    switch (act) {
    case Activation::tanh: {
        const double t = std::tanh(x);
        return 1.0 - t * t;
    }
    case Activation::softplus:
        // logistic sigmoid, written to avoid overflow for large |x|
        return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    case Activation::prelu:
        return x > 0.0 ? 1.0 : slope;
    }
    return 1.0;
}

} // namespace

std::string_view to_string(Activation act) noexcept {
    switch (act) {
    case Activation::tanh: return "tanh";
    case Activation::softplus: return "softplus";
    case Activation::prelu: return "prelu";
    }
    return "unknown";
}

Activation parse_activation(std::string_view name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "softplus") return Activation::softplus;
    if (name == "prelu") return Activation::prelu;
    throw RangeError("unknown activation '" + std::string(name) + "'");
}

ParamLayout::ParamLayout(std::vector<std::size_t> dims, Activation act)
    : dims_(std::move(dims)), activation_(act) {
    if (dims_.size() < 2) throw DimensionError("an MLP needs at least input and output dims");
    if (std::any_of(dims_.begin(), dims_.end(), [](std::size_t d) { return d == 0; }))
        throw DimensionError("MLP dims must be positive");

    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        LayerShape shape{dims_[l], dims_[l + 1], offset, offset + dims_[l] * dims_[l + 1]};
        offset = shape.bias_offset + shape.out;
        layers_.push_back(shape);
    }
    slopes_offset_ = offset;
    size_ = offset + (has_slopes() ? hidden_layers() : 0);
}

Gradients::Gradients(ParamLayout layout) : layout_(std::move(layout)), values_(layout_.size(), 0.0) {}

std::span<double> Gradients::weight(std::size_t layer) {
    const auto& s = layout_.layers().at(layer);
    return std::span<double>(values_).subspan(s.weight_offset, s.in * s.out);
}
std::span<const double> Gradients::weight(std::size_t layer) const {
    const auto& s = layout_.layers().at(layer);
    return std::span<const double>(values_).subspan(s.weight_offset, s.in * s.out);
}
std::span<double> Gradients::bias(std::size_t layer) {
    const auto& s = layout_.layers().at(layer);
    return std::span<double>(values_).subspan(s.bias_offset, s.out);
}
std::span<const double> Gradients::bias(std::size_t layer) const {
    const auto& s = layout_.layers().at(layer);
    return std::span<const double>(values_).subspan(s.bias_offset, s.out);
}
double& Gradients::slope(std::size_t hidden) {
    if (!layout_.has_slopes() || hidden >= layout_.hidden_layers())
        throw DimensionError("no prelu slope at hidden layer " + std::to_string(hidden));
    return values_[layout_.slope_offset(hidden)];
}
double Gradients::slope(std::size_t hidden) const {
    if (!layout_.has_slopes() || hidden >= layout_.hidden_layers())
        throw DimensionError("no prelu slope at hidden layer " + std::to_string(hidden));
    return values_[layout_.slope_offset(hidden)];
}

Gradients& Gradients::operator+=(const Gradients& other) {
    if (!(layout_ == other.layout_)) throw DimensionError("gradient shapes differ");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

Gradients& Gradients::operator*=(double factor) noexcept {
    for (double& v : values_) v *= factor;
    return *this;
}

void Gradients::zero() noexcept { std::fill(values_.begin(), values_.end(), 0.0); }

double Gradients::norm() const noexcept { return norm2(values_); }

Mlp Mlp::init(const std::vector<std::size_t>& dims, Activation act, std::uint64_t seed) {
    ParamLayout layout(dims, act);
    std::vector<double> params(layout.size(), 0.0);
    Rng rng(seed);
    for (const auto& s : layout.layers()) {
        const double bound = std::sqrt(6.0 / static_cast<double>(s.in + s.out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = 0; i < s.in * s.out; ++i) params[s.weight_offset + i] = dist(rng);
    }
    if (layout.has_slopes())
        for (std::size_t h = 0; h < layout.hidden_layers(); ++h)
            params[layout.slope_offset(h)] = kPreluSlopeInit;
    return Mlp(std::move(layout), std::move(params));
}

Mlp::Mlp(ParamLayout layout, std::vector<double> params)
    : layout_(std::move(layout)), params_(std::move(params)) {
    if (params_.size() != layout_.size())
        throw DimensionError("parameter count " + std::to_string(params_.size()) +
                             " does not match layout size " + std::to_string(layout_.size()));
}

std::span<double> Mlp::weight(std::size_t layer) {
    const auto& s = layout_.layers().at(layer);
    return std::span<double>(params_).subspan(s.weight_offset, s.in * s.out);
}
std::span<const double> Mlp::weight(std::size_t layer) const {
    const auto& s = layout_.layers().at(layer);
    return std::span<const double>(params_).subspan(s.weight_offset, s.in * s.out);
}
std::span<double> Mlp::bias(std::size_t layer) {
    const auto& s = layout_.layers().at(layer);
    return std::span<double>(params_).subspan(s.bias_offset, s.out);
}
std::span<const double> Mlp::bias(std::size_t layer) const {
    const auto& s = layout_.layers().at(layer);
    return std::span<const double>(params_).subspan(s.bias_offset, s.out);
}
double& Mlp::slope(std::size_t hidden) {
    if (!layout_.has_slopes() || hidden >= layout_.hidden_layers())
        throw DimensionError("no prelu slope at hidden layer " + std::to_string(hidden));
    return params_[layout_.slope_offset(hidden)];
}
double Mlp::slope(std::size_t hidden) const {
    if (!layout_.has_slopes() || hidden >= layout_.hidden_layers())
        throw DimensionError("no prelu slope at hidden layer " + std::to_string(hidden));
    return params_[layout_.slope_offset(hidden)];
}

void Mlp::check_input(std::span<const double> input) const {
    if (input.size() != input_dim())
        throw DimensionError("MLP input has length " + std::to_string(input.size()) + ", expected " +
                             std::to_string(input_dim()));
}

Vector Mlp::forward(std::span<const double> input) const {
    check_input(input);
    const Activation act = layout_.activation();
    const auto& layers = layout_.layers();
    Vector current(input.begin(), input.end());
    Vector next;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& s = layers[l];
        next.assign(s.out, 0.0);
        const double* w = params_.data() + s.weight_offset;
        const double* b = params_.data() + s.bias_offset;
        for (std::size_t o = 0; o < s.out; ++o) {
            double acc = b[o];
            const double* row = w + o * s.in;
            for (std::size_t i = 0; i < s.in; ++i) acc += row[i] * current[i];
            next[o] = acc;
        }
        if (l + 1 < layers.size()) {
            const double slope = layout_.has_slopes() ? params_[layout_.slope_offset(l)] : 0.0;
            for (double& v : next) v = activate(act, v, slope);
        }
        current.swap(next);
    }
    return current;
}

Vector Mlp::forward(std::span<const double> input, Tape& tape) const {
    check_input(input);
    const Activation act = layout_.activation();
    const auto& layers = layout_.layers();
    tape.inputs.resize(layers.size());
    tape.pre.resize(layers.size());
    tape.inputs[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& s = layers[l];
        const Vector& in = tape.inputs[l];
        Vector& pre = tape.pre[l];
        pre.assign(s.out, 0.0);
        const double* w = params_.data() + s.weight_offset;
        const double* b = params_.data() + s.bias_offset;
        for (std::size_t o = 0; o < s.out; ++o) {
            double acc = b[o];
            const double* row = w + o * s.in;
            for (std::size_t i = 0; i < s.in; ++i) acc += row[i] * in[i];
            pre[o] = acc;
        }
        if (l + 1 < layers.size()) {
            const double slope = layout_.has_slopes() ? params_[layout_.slope_offset(l)] : 0.0;
            Vector& out = tape.inputs[l + 1];
            out.resize(s.out);
            for (std::size_t o = 0; o < s.out; ++o) out[o] = activate(act, pre[o], slope);
        }
    }
    return tape.pre.back();
}

Gradients Mlp::backward(std::span<const double> input, std::span<const double> upstream) const {
    Tape tape;
    forward(input, tape);
    Gradients grads(layout_);
    accumulate_backward(tape, upstream, grads);
    return grads;
}

void Mlp::accumulate_backward(const Tape& tape, std::span<const double> upstream, Gradients& into,
                              std::span<double> input_grad) const {
    if (upstream.size() != output_dim())
        throw DimensionError("upstream has length " + std::to_string(upstream.size()) + ", expected " +
                             std::to_string(output_dim()));
    if (!(into.layout() == layout_)) throw DimensionError("gradient buffer shape differs from MLP");
    if (!input_grad.empty() && input_grad.size() != input_dim())
        throw DimensionError("input gradient buffer has wrong length");

    const Activation act = layout_.activation();
    const auto& layers = layout_.layers();
    auto g = into.values();

    Vector delta(upstream.begin(), upstream.end());
    Vector below;
    for (std::size_t l = layers.size(); l-- > 0;) {
        const auto& s = layers[l];
        const Vector& in = tape.inputs[l];
        const double* w = params_.data() + s.weight_offset;
        for (std::size_t o = 0; o < s.out; ++o) {
            const double d = delta[o];
            g[s.bias_offset + o] += d;
            double* grow = g.data() + s.weight_offset + o * s.in;
            for (std::size_t i = 0; i < s.in; ++i) grow[i] += d * in[i];
        }
        const bool need_below = l > 0 || !input_grad.empty();
        if (!need_below) break;

        below.assign(s.in, 0.0);
        for (std::size_t o = 0; o < s.out; ++o) {
            const double d = delta[o];
            const double* row = w + o * s.in;
            for (std::size_t i = 0; i < s.in; ++i) below[i] += row[i] * d;
        }
        if (l == 0) {
            std::copy(below.begin(), below.end(), input_grad.begin());
            break;
        }
        // `below` is dL/d(activation of layer l-1); push through the nonlinearity.
        const std::size_t h = l - 1;
        const Vector& pre = tape.pre[h];
        const double slope = layout_.has_slopes() ? params_[layout_.slope_offset(h)] : 0.0;
        if (act == Activation::prelu) {
            double dslope = 0.0;
            for (std::size_t i = 0; i < pre.size(); ++i)
                if (pre[i] <= 0.0) dslope += below[i] * pre[i];
            g[layout_.slope_offset(h)] += dslope;
        }
        delta.resize(pre.size());
        for (std::size_t i = 0; i < pre.size(); ++i)
            delta[i] = below[i] * activate_derivative(act, pre[i], slope);
    }
}

std::size_t Mlp::mac_count() const noexcept {
    std::size_t macs = 0;
    for (const auto& s : layout_.layers()) macs += s.in * s.out;
    return macs;
}

} // namespace hyperode::nn
