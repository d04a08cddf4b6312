#include "hyperode/ode/runge_kutta.hpp"

#include <string>

#include "hyperode/error.hpp"

namespace hyperode {

RkStep rk_step(const ButcherTableau& tab, VectorField& f, double s, std::span<const double> z, double eps) {
    if (!(eps > 0.0)) throw RangeError("step size must be positive");
    if (z.size() != f.dim()) throw DimensionError("state length does not match the vector field");
    if (!all_finite(z)) throw NumericError("non-finite state entering step", s, 0);

    const std::size_t p = tab.stages();
    std::vector<Vector> stages;
    stages.reserve(p);
    Vector stage_state(z.begin(), z.end());
    for (std::size_t i = 0; i < p; ++i) {
        std::copy(z.begin(), z.end(), stage_state.begin());
        for (std::size_t j = 0; j < i; ++j)
            if (tab.a[i][j] != 0.0) axpy(eps * tab.a[i][j], stages[j], stage_state);
        stages.push_back(f(s + tab.c[i] * eps, stage_state));
        if (!all_finite(stages.back())) throw NumericError("non-finite stage value", s, i);
    }

    RkStep out;
    out.psi.assign(z.size(), 0.0);
    for (std::size_t j = 0; j < p; ++j)
        if (tab.b[j] != 0.0) axpy(tab.b[j], stages[j], out.psi);
    out.z_next.assign(z.begin(), z.end());
    axpy(eps, out.psi, out.z_next);
    out.first_stage = std::move(stages.front());
    return out;
}

Trajectory solve_fixed(const ButcherTableau& tab, VectorField& f, std::span<const double> z0, Span span,
                       std::size_t steps) {
    Trajectory traj;
    traj.s = uniform_mesh(span, steps);
    const double eps = span.length() / static_cast<double>(steps);
    traj.z.reserve(steps + 1);
    traj.z.emplace_back(z0.begin(), z0.end());
    for (std::size_t k = 0; k < steps; ++k) {
        try {
            traj.z.push_back(rk_step(tab, f, traj.s[k], traj.z.back(), eps).z_next);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " at step " + std::to_string(k), e.s(), e.stage());
        }
    }
    return traj;
}

} // namespace hyperode
