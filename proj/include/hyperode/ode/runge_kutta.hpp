#pragma once

#include <cstddef>
#include <span>

#include "hyperode/ode/tableau.hpp"
#include "hyperode/ode/trajectory.hpp"
#include "hyperode/ode/vector_field.hpp"

namespace hyperode {

struct RkStep {
    Vector psi;          // sum_j b_j r_j
    Vector z_next;       // z + eps * psi
    Vector first_stage;  // r_1 = f(s, z), since c_1 = 0
};

// One explicit RK step: exactly tab.stages() evaluations of f.
// Throws NumericError carrying (s, stage) if a stage value is non-finite.
RkStep rk_step(const ButcherTableau& tab, VectorField& f, double s, std::span<const double> z, double eps);

// K steps of rk_step on the uniform mesh over `span`.
Trajectory solve_fixed(const ButcherTableau& tab, VectorField& f, std::span<const double> z0, Span span,
                       std::size_t steps);

} // namespace hyperode
