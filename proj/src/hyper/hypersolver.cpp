#include "hyperode/hyper/hypersolver.hpp"

#include <cmath>
#include <string>

#include "hyperode/error.hpp"

namespace hyperode {

Vector InputLayout::assemble(std::span<const double> z, std::span<const double> fz, double eps, double s) const {
    if (z.size() != state_dim || fz.size() != state_dim)
        throw DimensionError("corrector input expects state vectors of length " + std::to_string(state_dim));
    Vector input;
    input.reserve(width());
    input.insert(input.end(), z.begin(), z.end());
    input.insert(input.end(), fz.begin(), fz.end());
    input.push_back(eps);
    if (include_s) input.push_back(s);
    return input;
}

HyperStep hyper_step(const ButcherTableau& base, VectorField& f, double s, std::span<const double> z, double eps,
                     const CorrectionFn& correction) {
    RkStep rk = rk_step(base, f, s, z, eps);
    HyperStep out;
    out.correction = correction(CorrectionQuery{s, eps, z, rk.first_stage});
    if (out.correction.size() != z.size()) throw DimensionError("correction length does not match the state");
    out.z_next = std::move(rk.z_next);
    axpy(std::pow(eps, static_cast<double>(base.order + 1)), out.correction, out.z_next);
    if (!all_finite(out.z_next)) throw NumericError("non-finite hypersolver state", s, base.stages());
    out.psi = std::move(rk.psi);
    out.fz = std::move(rk.first_stage);
    return out;
}

Hypersolver::Hypersolver(ButcherTableau base, nn::Mlp corrector, InputLayout layout)
    : base_(std::move(base)), corrector_(std::move(corrector)), layout_(layout) {
    validate(base_);
    if (layout_.state_dim == 0) throw DimensionError("hypersolver state dimension must be positive");
    if (corrector_.input_dim() != layout_.width())
        throw DimensionError("corrector input dim " + std::to_string(corrector_.input_dim()) +
                             " does not match layout width " + std::to_string(layout_.width()));
    if (corrector_.output_dim() != layout_.state_dim)
        throw DimensionError("corrector output dim " + std::to_string(corrector_.output_dim()) +
                             " does not match state dim " + std::to_string(layout_.state_dim));
}

Hypersolver Hypersolver::create(ButcherTableau base, std::size_t state_dim, const std::vector<std::size_t>& hidden,
                                nn::Activation act, std::uint64_t seed, bool include_s) {
    InputLayout layout{state_dim, include_s};
    std::vector<std::size_t> dims{layout.width()};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(state_dim);
    return Hypersolver(std::move(base), nn::Mlp::init(dims, act, seed), layout);
}

Hypersolver Hypersolver::with_base(ButcherTableau base) const {
    if (base.order != base_.order)
        throw RangeError("cannot swap a order-" + std::to_string(base_.order) + " base for order " +
                         std::to_string(base.order));
    return Hypersolver(std::move(base), corrector_, layout_);
}

Vector Hypersolver::correction(double s, double eps, std::span<const double> z, std::span<const double> fz) const {
    return corrector_.forward(layout_.assemble(z, fz, eps, s));
}

Vector Hypersolver::step(VectorField& f, double s, std::span<const double> z, double eps) {
    if (z.size() != layout_.state_dim) throw DimensionError("state length does not match the hypersolver");
    auto result = hyper_step(base_, f, s, z, eps, [this](const CorrectionQuery& q) {
        ++corrector_evals_;
        return correction(q.s, q.eps, q.z, q.fz);
    });
    return std::move(result.z_next);
}

Trajectory hyper_solve(Hypersolver& hs, VectorField& f, std::span<const double> z0, Span span, std::size_t steps) {
    Trajectory traj;
    traj.s = uniform_mesh(span, steps);
    const double eps = span.length() / static_cast<double>(steps);
    traj.z.reserve(steps + 1);
    traj.z.emplace_back(z0.begin(), z0.end());
    for (std::size_t k = 0; k < steps; ++k) {
        try {
            traj.z.push_back(hs.step(f, traj.s[k], traj.z.back(), eps));
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " at step " + std::to_string(k), e.s(), e.stage());
        }
    }
    return traj;
}

std::vector<Vector> base_residuals(const ButcherTableau& base, VectorField& f, const Trajectory& truth) {
    truth.require_uniform();
    const double eps = truth.step_size();
    const double scale = std::pow(eps, static_cast<double>(base.order + 1));
    std::vector<Vector> residuals;
    residuals.reserve(truth.steps());
    for (std::size_t k = 0; k < truth.steps(); ++k) {
        const RkStep rk = rk_step(base, f, truth.s[k], truth.z[k], eps);
        Vector r(truth.dim());
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] = ((truth.z[k + 1][i] - truth.z[k][i]) - eps * rk.psi[i]) / scale;
        residuals.push_back(std::move(r));
    }
    return residuals;
}

} // namespace hyperode
