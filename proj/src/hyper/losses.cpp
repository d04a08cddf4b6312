#include "hyperode/hyper/losses.hpp"

#include <algorithm>
#include <cmath>

#include "hyperode/error.hpp"

namespace hyperode {

void ResidualDataset::append(const ResidualDataset& other) {
    records.insert(records.end(), other.records.begin(), other.records.end());
}

ResidualDataset build_residual_dataset(const ButcherTableau& base, VectorField& f, const Trajectory& truth) {
    truth.require_uniform();
    const double eps = truth.step_size();
    const double scale = std::pow(eps, static_cast<double>(base.order + 1));
    ResidualDataset ds;
    ds.records.reserve(truth.steps());
    for (std::size_t k = 0; k < truth.steps(); ++k) {
        RkStep rk = rk_step(base, f, truth.s[k], truth.z[k], eps);
        ResidualRecord rec{truth.s[k], eps, truth.z[k], std::move(rk.first_stage), Vector(truth.dim())};
        for (std::size_t i = 0; i < rec.residual.size(); ++i)
            rec.residual[i] = ((truth.z[k + 1][i] - truth.z[k][i]) - eps * rk.psi[i]) / scale;
        if (!all_finite(rec.residual)) throw NumericError("non-finite residual", truth.s[k], 0);
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

double residual_loss(const Hypersolver& hs, const ResidualDataset& ds) {
    if (ds.empty()) throw RangeError("residual loss needs a nonempty dataset");
    double total = 0.0;
    for (const auto& rec : ds.records) {
        const Vector g = hs.correction(rec.s, rec.eps, rec.z, rec.fz);
        total += norm2(difference(rec.residual, g));
    }
    return total / static_cast<double>(ds.size());
}

double residual_loss_gradient(const Hypersolver& hs, const ResidualDataset& ds, nn::Gradients& grads) {
    if (ds.empty()) throw RangeError("residual loss needs a nonempty dataset");
    const auto& net = hs.corrector();
    const double weight = 1.0 / static_cast<double>(ds.size());
    nn::Tape tape;
    double total = 0.0;
    for (const auto& rec : ds.records) {
        const Vector g = net.forward(hs.layout().assemble(rec.z, rec.fz, rec.eps, rec.s), tape);
        Vector gap = difference(g, rec.residual);
        const double dist = norm2(gap);
        total += dist;
        // d||g - R|| / dg is undefined at zero; take the zero subgradient there.
        if (dist == 0.0) continue;
        for (double& v : gap) v *= weight / dist;
        net.accumulate_backward(tape, gap, grads);
    }
    return total * weight;
}

double max_residual_gap(const Hypersolver& hs, const ResidualDataset& ds) {
    double worst = 0.0;
    for (const auto& rec : ds.records)
        worst = std::max(worst, norm2(difference(rec.residual, hs.correction(rec.s, rec.eps, rec.z, rec.fz))));
    return worst;
}

double trajectory_loss(const Hypersolver& hs, VectorField& f, const Trajectory& truth) {
    truth.require_uniform();
    Hypersolver local = hs;
    const Trajectory approx = hyper_solve(local, f, truth.z.front(), Span{truth.s.front(), truth.s.back()},
                                          truth.steps());
    double total = 0.0;
    for (std::size_t k = 1; k < truth.s.size(); ++k) total += norm2(difference(truth.z[k], approx.z[k]));
    return total;
}

double trajectory_loss_gradient(const Hypersolver& hs, VectorField& f, const Trajectory& truth, nn::Gradients& grads) {
    truth.require_uniform();
    const std::size_t steps = truth.steps();
    const std::size_t n = truth.dim();
    const double eps = truth.step_size();
    const double scale = std::pow(eps, static_cast<double>(hs.order() + 1));
    const auto& net = hs.corrector();

    // Forward unroll, keeping one tape per correction.
    std::vector<nn::Tape> tapes(steps);
    std::vector<Vector> states;
    states.reserve(steps + 1);
    states.push_back(truth.z.front());
    for (std::size_t k = 0; k < steps; ++k) {
        RkStep rk = rk_step(hs.base(), f, truth.s[k], states.back(), eps);
        const Vector g = net.forward(hs.layout().assemble(states.back(), rk.first_stage, eps, truth.s[k]), tapes[k]);
        axpy(scale, g, rk.z_next);
        if (!all_finite(rk.z_next)) throw NumericError("non-finite hypersolver state", truth.s[k], 0);
        states.push_back(std::move(rk.z_next));
    }

    double total = 0.0;
    Vector adjoint(n, 0.0);
    Vector input_grad(hs.layout().width());
    Vector upstream(n);
    for (std::size_t k = steps; k >= 1; --k) {
        Vector gap = difference(states[k], truth.z[k]);
        const double dist = norm2(gap);
        total += dist;
        if (dist > 0.0) axpy(1.0 / dist, gap, adjoint);
        // z_k = z_{k-1} + eps psi + scale * g(z_{k-1}, ...)
        for (std::size_t i = 0; i < n; ++i) upstream[i] = scale * adjoint[i];
        net.accumulate_backward(tapes[k - 1], upstream, grads, input_grad);
        for (std::size_t i = 0; i < n; ++i) adjoint[i] += input_grad[i];
    }
    return total;
}

} // namespace hyperode
