#include "hyperode/problems/problems.hpp"

#include <charconv>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "hyperode/error.hpp"
#include "hyperode/random.hpp"

namespace hyperode::problems {

namespace {

Box symmetric_box(std::size_t dim, double half_width) {
    return Box{Vector(dim, -half_width), Vector(dim, half_width)};
}

std::size_t parse_size(std::string_view text, std::string_view whole) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw RangeError("cannot parse problem name '" + std::string(whole) + "'");
    return value;
}

} // namespace

Vector sample_box(const Box& box, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector z(box.lo.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    return z;
}

TrainingProblem ProblemSpec::training_problem() const {
    Box box = ic_box;
    return TrainingProblem{field.clone(), [box](std::uint64_t seed) { return sample_box(box, seed); }};
}

ProblemSpec problem_linear(const std::vector<Vector>& lambda, std::string name) {
    const std::size_t n = lambda.size();
    if (n == 0) throw DimensionError("linear problem needs a nonempty matrix");
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (lambda[i].size() != n) throw DimensionError("linear problem matrix must be square");
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(lambda[i][j])) throw RangeError("linear problem matrix must be finite");
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = lambda[i][j];
        }
    }

    auto dynamics = [a](double, std::span<const double> z) {
        const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
        const Eigen::VectorXd out = a * zv;
        return Vector(out.begin(), out.end());
    };
    auto exact = [a](double s, std::span<const double> z0) {
        if (a.rows() == 1) return Vector{std::exp(s * a(0, 0)) * z0[0]};
        const Eigen::Map<const Eigen::VectorXd> zv(z0.data(), static_cast<Eigen::Index>(z0.size()));
        const Eigen::MatrixXd flow = (s * a).exp();
        const Eigen::VectorXd out = flow * zv;
        return Vector(out.begin(), out.end());
    };

    ProblemSpec spec{std::move(name), n, VectorField(n, dynamics, exact), symmetric_box(n, 1.0), {0.0, 1.0}, n * n, {}};
    return spec;
}

ProblemSpec problem_vdp(double mu) {
    if (!(mu >= 0.0)) throw RangeError("Van der Pol mu must be >= 0");
    auto dynamics = [mu](double, std::span<const double> z) {
        return Vector{z[1], mu * (1.0 - z[0] * z[0]) * z[1] - z[0]};
    };
    std::string name = mu == 1.0 ? "vdp1" : "vdp-mu" + std::to_string(mu);
    // mu * (1 - z1^2) * z2 - z1: three multiplies per evaluation
    return ProblemSpec{std::move(name), 2, VectorField(2, dynamics), symmetric_box(2, 2.0), {0.0, 1.0}, 3, {}};
}

ProblemSpec problem_random_mlp(std::size_t dim, std::size_t hidden, std::uint64_t seed) {
    if (dim == 0) throw DimensionError("random MLP problem needs dim >= 1");
    if (hidden < dim) throw DimensionError("random MLP problem needs hidden >= dim");

    nn::Mlp net = nn::Mlp::init({dim, hidden, dim}, nn::Activation::tanh, derive_seed(seed, "weights"));
    {
        // Hidden biases in [-1, 1] and output biases within the Glorot bound
        // keep the origin from being an equilibrium.
        Rng rng(derive_seed(seed, "biases"));
        std::uniform_real_distribution<double> hidden_bias(-1.0, 1.0);
        for (double& b : net.bias(0)) b = hidden_bias(rng);
        const double bound = std::sqrt(6.0 / static_cast<double>(hidden + dim));
        std::uniform_real_distribution<double> out_bias(-bound, bound);
        for (double& b : net.bias(1)) b = out_bias(rng);
    }

    const Box box = symmetric_box(dim, 1.0);
    double largest = 0.0;
    const std::uint64_t probe_root = derive_seed(seed, "scale-probe");
    for (std::uint64_t i = 0; i < 1024; ++i)
        largest = std::max(largest, norm2(net.forward(sample_box(box, splitmix64(probe_root + i)))));
    if (largest > 0.0) {
        for (double& w : net.weight(1)) w /= largest;
        for (double& b : net.bias(1)) b /= largest;
    }

    auto shared = std::make_shared<const nn::Mlp>(std::move(net));
    auto dynamics = [shared](double, std::span<const double> z) { return shared->forward(z); };
    std::string name = "mlp-d" + std::to_string(dim) + "-s" + std::to_string(seed);
    if (hidden != std::max(kRandomMlpHidden, dim)) name += "-h" + std::to_string(hidden);
    return ProblemSpec{std::move(name), dim, VectorField(dim, dynamics), box, {0.0, 1.0}, shared->mac_count(), shared};
}

ProblemSpec problem_by_name(std::string_view name) {
    if (name == "linear1") return problem_linear({{1.0}}, "linear1");
    if (name == "rotation2") return problem_linear({{0.0, -1.0}, {1.0, 0.0}}, "rotation2");
    if (name == "vdp1") return problem_vdp(1.0);
    if (name.starts_with("mlp-d")) {
        const auto rest = name.substr(5);
        const auto sep = rest.find("-s");
        if (sep == std::string_view::npos) throw RangeError("cannot parse problem name '" + std::string(name) + "'");
        const std::size_t dim = parse_size(rest.substr(0, sep), name);
        const std::size_t seed = parse_size(rest.substr(sep + 2), name);
        if (dim == 0) throw RangeError("problem '" + std::string(name) + "' needs dim >= 1");
        return problem_random_mlp(dim, std::max(kRandomMlpHidden, dim), seed);
    }
    throw RangeError("unknown problem '" + std::string(name) + "'");
}

} // namespace hyperode::problems
