#include "hyperode/ode/dopri5.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hyperode/error.hpp"

namespace hyperode {

namespace {

// Dormand & Prince (1980) coefficients.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0},
};
// Fifth-order weights minus embedded fourth-order weights.
constexpr std::array<double, 7> kE{71.0 / 57600.0,  0.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                   -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0};

} // namespace

Dopri5Result solve_dopri5(VectorField& f, std::span<const double> z0, Span span, double atol, double rtol,
                          const Dopri5Controller& ctl) {
    if (!(atol > 0.0) || !(rtol > 0.0)) throw RangeError("dopri5 tolerances must be positive");
    if (!(span.end > span.begin)) throw RangeError("dopri5 span must satisfy s1 > s0");
    if (z0.size() != f.dim()) throw DimensionError("initial condition length does not match the field");
    if (!all_finite(z0)) throw NumericError("non-finite initial condition");

    const std::size_t n = z0.size();
    const double length = span.length();
    const double h_floor = ctl.underflow_fraction * length;

    Dopri5Result out;
    const std::size_t nfe_before = f.nfe();
    Vector z(z0.begin(), z0.end());
    double s = span.begin;
    double h = ctl.initial_step_fraction * length;
    out.s.push_back(s);
    out.z.push_back(z);

    std::array<Vector, 7> k;
    k[0] = f(s, z);
    if (!all_finite(k[0])) throw NumericError("non-finite dynamics value", s, 0);
    Vector stage(n), z_next(n);

    for (std::size_t attempt = 0;; ++attempt) {
        if (attempt >= ctl.max_attempts) throw SolverFailure("dopri5 exceeded the attempt budget", s);
        if (h < h_floor) throw SolverFailure("dopri5 step size underflow", s);
        // Take the rest of the span when the remainder would be negligible.
        const bool last = (span.end - s) - h <= 1e-12 * length;
        if (last) h = span.end - s;

        for (std::size_t i = 1; i < 7; ++i) {
            stage = z;
            for (std::size_t j = 0; j < i; ++j)
                if (kA[i][j] != 0.0) axpy(h * kA[i][j], k[j], stage);
            if (i == 6) z_next = stage;
            k[i] = f(s + kC[i] * h, stage);
            if (!all_finite(k[i])) throw NumericError("non-finite dynamics value", s, i);
        }

        double acc = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            double est = 0.0;
            for (std::size_t j = 0; j < 7; ++j) est += kE[j] * k[j][d];
            est *= h;
            const double scale = atol + rtol * std::max(std::abs(z[d]), std::abs(z_next[d]));
            acc += (est / scale) * (est / scale);
        }
        const double err = std::sqrt(acc / static_cast<double>(n));
        const double factor =
            err == 0.0 ? ctl.max_factor
                       : std::clamp(ctl.safety * std::pow(err, -1.0 / 5.0), ctl.min_factor, ctl.max_factor);

        if (err <= 1.0) {
            s = last ? span.end : s + h;
            z.swap(z_next);
            k[0] = k[6];
            out.s.push_back(s);
            out.z.push_back(z);
            out.accepted_errors.push_back(err);
            ++out.accepted;
            if (last) break;
        } else {
            ++out.rejected;
        }
        h *= factor;
    }

    out.final_state = z;
    out.nfe = f.nfe() - nfe_before;
    return out;
}

Trajectory solve_reference(VectorField& f, std::span<const double> z0, Span span, std::size_t steps, double tol) {
    Trajectory traj;
    traj.s = uniform_mesh(span, steps);
    traj.z.reserve(steps + 1);
    traj.z.emplace_back(z0.begin(), z0.end());
    for (std::size_t k = 0; k < steps; ++k) {
        auto seg = solve_dopri5(f, traj.z.back(), Span{traj.s[k], traj.s[k + 1]}, tol, tol);
        traj.z.push_back(std::move(seg.final_state));
    }
    return traj;
}

} // namespace hyperode
