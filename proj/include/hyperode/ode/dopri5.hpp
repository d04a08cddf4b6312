#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hyperode/ode/trajectory.hpp"
#include "hyperode/ode/vector_field.hpp"

namespace hyperode {

// Step controller constants. Frozen so runs are reproducible.
struct Dopri5Controller {
    double safety = 0.9;
    double min_factor = 0.2;
    double max_factor = 10.0;
    double initial_step_fraction = 1e-2;  // h0 = fraction * |span|
    double underflow_fraction = 1e-14;    // fail when h < fraction * |span|
    std::size_t max_attempts = 10'000'000;
};

struct Dopri5Result {
    Vector final_state;
    // Accepted checkpoints, starting with (span.begin, z0) and ending at span.end.
    std::vector<double> s;
    std::vector<Vector> z;
    // Scaled RMS error estimate of every accepted step (all <= 1).
    std::vector<double> accepted_errors;
    std::size_t nfe = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

// Dormand-Prince 5(4) with FSAL and local extrapolation. Error norm is
// rms((z5 - z4) / (atol + rtol * max(|z|, |z_next|))). The last step is
// truncated so the final state sits exactly at span.end.
// NFE = 1 + 6 * (accepted + rejected).
Dopri5Result solve_dopri5(VectorField& f, std::span<const double> z0, Span span, double atol, double rtol,
                          const Dopri5Controller& controller = {});

// Ground truth on a uniform K-step mesh: dopri5 restarted on every segment
// [s_k, s_{k+1}] from the previous checkpoint, so checkpoints carry no
// interpolation error.
Trajectory solve_reference(VectorField& f, std::span<const double> z0, Span span, std::size_t steps,
                           double tol = 1e-7);

} // namespace hyperode
