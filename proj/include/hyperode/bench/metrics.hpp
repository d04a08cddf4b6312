#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hyperode/bench/method.hpp"
#include "hyperode/hyper/hypersolver.hpp"
#include "hyperode/problems/problems.hpp"

namespace hyperode::bench {

// e_k = ||z(s_{k+1}) - z(s_k) - eps update(s_k, z(s_k))||_2, one step from each true state.
Vector local_errors(const ButcherTableau& tab, VectorField& f, const Trajectory& truth);
// Hypersolver update includes eps^p g, so e_k = eps^(p+1) ||R_k - g_k||_2.
Vector local_errors(const Hypersolver& hs, VectorField& f, const Trajectory& truth);
Vector local_errors(const Method& method, VectorField& f, const Trajectory& truth);

// E_k = ||z(s_k) - z_k||_2 on matching meshes; throws MeshError otherwise.
Vector global_errors(const Trajectory& traj, const Trajectory& truth);

struct MapeResult {
    double value = 0.0;        // percent
    std::size_t excluded = 0;  // components skipped because the truth is exactly 0
};

// Mean over components of 100 |z_K - z(s_K)| / |z(s_K)|. Components whose truth
// is exactly zero are excluded and counted; all-zero truth throws UndefinedMetricError.
MapeResult mape(std::span<const double> approx, std::span<const double> truth);
MapeResult mape(const Trajectory& traj, const Trajectory& truth);

// O_r = 1 + (1/p) MAC_g / MAC_f.
double relative_overhead(std::size_t order, double mac_f, double mac_g);

struct ErrorReport {
    Vector local;   // e_k, k = 0..K-1
    Vector global;  // E_k, k = 0..K
    double mape = 0.0;
    std::size_t nfe_f = 0;
    std::size_t nfe_g = 0;
    std::size_t mac_f = 0;
    std::size_t mac_g = 0;
};

// Solves with `method` on the truth mesh and collects every metric.
ErrorReport error_report(const Method& method, VectorField& f, const Trajectory& truth, std::size_t mac_f);

using SolveFn = std::function<Trajectory(VectorField&, std::span<const double>, Span, std::size_t)>;

struct OrderPoint {
    double eps = 0.0;
    std::size_t steps = 0;
    double error = 0.0;  // terminal global error
    bool used = true;    // false when below the underflow floor
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<OrderPoint> points;
    std::size_t used = 0;
    bool truncated = false;   // some grid points underflowed and were dropped
    bool degenerate = false;  // fewer than two usable points; slope is NaN
};

inline constexpr double kOrderErrorFloor = 1e-13;

// Least-squares fit of log(terminal error) against log(eps). The reference is
// the exact flow when the problem has one, otherwise dopri5 at 1e-11.
// eps_grid must divide the span length and span at least two decades.
SlopeFit order_slope(const SolveFn& solver, const problems::ProblemSpec& problem, std::span<const double> z0,
                     std::span<const double> eps_grid);
SlopeFit order_slope(const Method& method, const problems::ProblemSpec& problem, std::span<const double> z0,
                     std::span<const double> eps_grid);

} // namespace hyperode::bench
