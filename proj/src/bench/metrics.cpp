#include "hyperode/bench/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hyperode/error.hpp"
#include "hyperode/ode/dopri5.hpp"
#include "hyperode/ode/runge_kutta.hpp"

namespace hyperode::bench {

namespace {

// Shared by both local_errors overloads: defect of one step from each true state.
template <typename Correction>
Vector local_errors_impl(const ButcherTableau& tab, VectorField& f, const Trajectory& truth, Correction&& correction) {
    truth.require_uniform();
    const double eps = truth.step_size();
    const double scale = std::pow(eps, static_cast<double>(tab.order + 1));
    Vector errors(truth.steps());
    for (std::size_t k = 0; k < truth.steps(); ++k) {
        const RkStep rk = rk_step(tab, f, truth.s[k], truth.z[k], eps);
        const Vector g = correction(truth.s[k], eps, truth.z[k], rk.first_stage);
        double acc = 0.0;
        for (std::size_t i = 0; i < truth.dim(); ++i) {
            const double defect = (truth.z[k + 1][i] - truth.z[k][i]) - eps * rk.psi[i];
            const double e = g.empty() ? defect : defect - scale * g[i];
            acc += e * e;
        }
        errors[k] = std::sqrt(acc);
    }
    return errors;
}

} // namespace

Vector local_errors(const ButcherTableau& tab, VectorField& f, const Trajectory& truth) {
    return local_errors_impl(tab, f, truth, [](double, double, std::span<const double>, std::span<const double>) {
        return Vector{};
    });
}

Vector local_errors(const Hypersolver& hs, VectorField& f, const Trajectory& truth) {
    return local_errors_impl(hs.base(), f, truth,
                             [&hs](double s, double eps, std::span<const double> z, std::span<const double> fz) {
                                 return hs.correction(s, eps, z, fz);
                             });
}

Vector local_errors(const Method& method, VectorField& f, const Trajectory& truth) {
    if (const auto* hs = method.hypersolver()) return local_errors(*hs, f, truth);
    return local_errors(method.base(), f, truth);
}

Vector global_errors(const Trajectory& traj, const Trajectory& truth) {
    if (traj.s.size() != truth.s.size() || traj.z.size() != truth.z.size())
        throw MeshError("trajectories have different mesh lengths");
    Vector errors(traj.s.size());
    for (std::size_t k = 0; k < traj.s.size(); ++k) {
        const double tol = 1e-12 * std::max(1.0, std::abs(truth.s[k]));
        if (std::abs(traj.s[k] - truth.s[k]) > tol) throw MeshError("trajectory meshes differ at point " + std::to_string(k));
        if (traj.z[k].size() != truth.z[k].size()) throw DimensionError("trajectory states have different lengths");
        errors[k] = norm2(difference(truth.z[k], traj.z[k]));
    }
    return errors;
}

MapeResult mape(std::span<const double> approx, std::span<const double> truth) {
    if (approx.size() != truth.size()) throw DimensionError("MAPE needs states of equal length");
    MapeResult out;
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 0.0) {
            ++out.excluded;
            continue;
        }
        total += std::abs(approx[i] - truth[i]) / std::abs(truth[i]);
        ++counted;
    }
    if (counted == 0) throw UndefinedMetricError("MAPE is undefined for an all-zero truth state");
    out.value = 100.0 * total / static_cast<double>(counted);
    return out;
}

MapeResult mape(const Trajectory& traj, const Trajectory& truth) { return mape(traj.terminal(), truth.terminal()); }

double relative_overhead(std::size_t order, double mac_f, double mac_g) {
    if (order == 0 || !(mac_f > 0.0)) throw RangeError("relative overhead needs p >= 1 and MAC_f > 0");
    if (mac_g < 0.0) throw RangeError("relative overhead needs MAC_g >= 0");
    return 1.0 + (mac_g / mac_f) / static_cast<double>(order);
}

ErrorReport error_report(const Method& method, VectorField& f, const Trajectory& truth, std::size_t mac_f) {
    truth.require_uniform();
    ErrorReport report;
    report.mac_f = mac_f;
    report.mac_g = method.mac_g();

    const std::size_t before = f.nfe();
    const auto solved = method.solve(f, truth.z.front(), Span{truth.s.front(), truth.s.back()}, truth.steps());
    report.nfe_f = f.nfe() - before;
    report.nfe_g = solved.corrector_evals;
    report.global = global_errors(solved.trajectory, truth);
    report.mape = mape(solved.trajectory, truth).value;
    report.local = local_errors(method, f, truth);
    return report;
}

SlopeFit order_slope(const SolveFn& solver, const problems::ProblemSpec& problem, std::span<const double> z0,
                     std::span<const double> eps_grid) {
    if (eps_grid.size() < 2) throw RangeError("order fit needs at least two step sizes");
    const Span span = problem.span_default;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double eps : eps_grid) {
        if (!(eps > 0.0)) throw RangeError("step sizes must be positive");
        lo = std::min(lo, eps);
        hi = std::max(hi, eps);
    }
    if (hi / lo < 100.0 * (1.0 - 1e-12)) throw RangeError("order fit grid must span at least two decades");

    Vector reference;
    if (problem.has_exact()) {
        reference = problem.field.exact(span.length(), z0);
    } else {
        VectorField f = problem.field.clone();
        reference = solve_dopri5(f, z0, span, 1e-11, 1e-11).final_state;
    }

    SlopeFit fit;
    for (double eps : eps_grid) {
        const double exact_steps = span.length() / eps;
        const auto steps = static_cast<std::size_t>(std::llround(exact_steps));
        if (steps == 0 || std::abs(exact_steps - static_cast<double>(steps)) > 1e-9 * exact_steps)
            throw RangeError("step size " + std::to_string(eps) + " does not divide the span");
        VectorField f = problem.field.clone();
        const Trajectory traj = solver(f, z0, span, steps);
        const double err = norm2(difference(traj.terminal(), reference));
        fit.points.push_back(OrderPoint{eps, steps, err, err >= kOrderErrorFloor && std::isfinite(err)});
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : fit.points) {
        if (!p.used) {
            fit.truncated = true;
            continue;
        }
        const double x = std::log(p.eps), y = std::log(p.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++fit.used;
    }
    if (fit.used < 2) {
        fit.degenerate = true;
        fit.slope = fit.intercept = fit.r2 = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    const double n = static_cast<double>(fit.used);
    const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
    fit.slope = cxy / cxx;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.r2 = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
    return fit;
}

SlopeFit order_slope(const Method& method, const problems::ProblemSpec& problem, std::span<const double> z0,
                     std::span<const double> eps_grid) {
    return order_slope(
        [&method](VectorField& f, std::span<const double> z, Span span, std::size_t steps) {
            return method.solve(f, z, span, steps).trajectory;
        },
        problem, z0, eps_grid);
}

} // namespace hyperode::bench
