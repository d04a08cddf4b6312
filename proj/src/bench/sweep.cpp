#include "hyperode/bench/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "hyperode/bench/metrics.hpp"
#include "hyperode/error.hpp"
#include "hyperode/format.hpp"
#include "hyperode/ode/dopri5.hpp"

namespace hyperode::bench {

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
std::uint64_t median_time_ns(std::size_t runs, std::size_t per_run, Fn&& body) {
    body();  // warmup, discarded
    std::vector<std::uint64_t> samples;
    for (std::size_t r = 0; r < std::max<std::size_t>(runs, 1); ++r) {
        const auto start = Clock::now();
        body();
        const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
        samples.push_back(static_cast<std::uint64_t>(ns) / std::max<std::size_t>(per_run, 1));
    }
    std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
    return samples[samples.size() / 2];
}

struct Evaluation {
    double mape = 0.0;
    double global_err = 0.0;
    std::size_t nfe_f = 0;
    std::size_t nfe_g = 0;
};

// Mean terminal metrics of `method` at K steps over all reference initial conditions.
Evaluation evaluate(const Method& method, const problems::ProblemSpec& problem, const Reference& ref,
                    std::size_t steps) {
    VectorField f = problem.field.clone();
    Evaluation out;
    const double weight = 1.0 / static_cast<double>(ref.initial.size());
    for (std::size_t i = 0; i < ref.initial.size(); ++i) {
        f.reset_nfe();
        const auto solved = method.solve(f, ref.initial[i], problem.span_default, steps);
        if (i == 0) {
            out.nfe_f = f.nfe();
            out.nfe_g = solved.corrector_evals;
        } else if (f.nfe() != out.nfe_f || solved.corrector_evals != out.nfe_g) {
            throw Error("evaluation counts differ between initial conditions");
        }
        out.mape += weight * mape(solved.trajectory.terminal(), ref.terminal[i]).value;
        out.global_err += weight * norm2(difference(solved.trajectory.terminal(), ref.terminal[i]));
    }
    return out;
}

ParetoRow run_cell(const Method& method, const problems::ProblemSpec& problem, const Reference& ref,
                   std::size_t steps, const SweepOptions& options) {
    ParetoRow row;
    row.solver = method.name();
    row.steps = steps;
    row.eps = problem.span_default.length() / static_cast<double>(steps);
    // Counts implied by the method; a failed cell keeps them so it still sorts.
    row.nfe_f = steps * method.stages();
    row.nfe_g = method.corrected() ? steps : 0;
    row.macs = row.nfe_f * problem.mac_f + row.nfe_g * method.mac_g();
    try {
        const Evaluation ev = evaluate(method, problem, ref, steps);
        if (ev.nfe_f != row.nfe_f || ev.nfe_g != row.nfe_g)
            throw Error("evaluation counters disagree with the accounting identity");
        row.mape = ev.mape;
        row.global_err = ev.global_err;
        VectorField f = problem.field.clone();
        row.walltime_ns = median_time_ns(options.timing_runs, ref.initial.size(), [&] {
            for (const auto& z0 : ref.initial) method.solve(f, z0, problem.span_default, steps);
        });
    } catch (const Error& e) {
        row.failed = true;
        row.failure = e.what();
        row.mape = row.global_err = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

} // namespace

Reference make_reference(const problems::ProblemSpec& problem, std::span<const std::uint64_t> seeds, double truth_tol) {
    if (seeds.empty()) throw RangeError("benchmarks need at least one initial-condition seed");
    Reference ref;
    VectorField f = problem.field.clone();
    for (std::uint64_t seed : seeds) {
        Vector z0 = problem.sample_ic(seed);
        ref.terminal.push_back(problem.has_exact()
                                   ? problem.field.exact(problem.span_default.length(), z0)
                                   : solve_dopri5(f, z0, problem.span_default, truth_tol, truth_tol).final_state);
        ref.initial.push_back(std::move(z0));
    }
    return ref;
}

std::vector<ParetoRow> pareto_sweep(const std::vector<Method>& methods, const problems::ProblemSpec& problem,
                                    std::span<const std::size_t> steps_grid, std::span<const std::uint64_t> seeds,
                                    const SweepOptions& options) {
    for (std::size_t k : steps_grid)
        if (k == 0) throw RangeError("step counts must be >= 1");
    const Reference ref = make_reference(problem, seeds, options.truth_tol);

    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t m = 0; m < methods.size(); ++m)
        for (std::size_t k : steps_grid) cells.emplace_back(m, k);
    std::vector<ParetoRow> rows(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++)
            rows[i] = run_cell(methods[cells[i].first], problem, ref, cells[i].second, options);
    };
    const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(cells.size(), 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    std::stable_sort(rows.begin(), rows.end(), [](const ParetoRow& a, const ParetoRow& b) {
        if (a.macs != b.macs) return a.macs < b.macs;
        if (a.solver != b.solver) return a.solver < b.solver;
        return a.steps < b.steps;
    });
    return rows;
}

std::vector<SpeedupRow> speedup_table(const std::vector<Method>& methods, const problems::ProblemSpec& problem,
                                      double budget, std::span<const std::uint64_t> seeds,
                                      const SpeedupOptions& options) {
    if (!(budget >= 0.0)) throw RangeError("accuracy budget must be >= 0");
    if (options.max_steps == 0) throw RangeError("max_steps must be >= 1");
    const Reference ref = make_reference(problem, seeds, options.truth_tol);
    const Span span = problem.span_default;
    std::vector<SpeedupRow> rows;

    {
        SpeedupRow row;
        row.solver = "dopri5";
        row.flagged = true;
        for (double tol : options.dopri5_tolerances) {
            VectorField f = problem.field.clone();
            double m = 0.0, nfe = 0.0, steps = 0.0;
            for (std::size_t i = 0; i < ref.initial.size(); ++i) {
                const auto res = solve_dopri5(f, ref.initial[i], span, tol, tol);
                m += mape(res.final_state, ref.terminal[i]).value;
                nfe += static_cast<double>(res.nfe);
                steps += static_cast<double>(res.accepted);
            }
            const double n = static_cast<double>(ref.initial.size());
            if (m / n <= budget) {
                row = SpeedupRow{"dopri5", static_cast<std::size_t>(std::lround(steps / n)), tol, nfe / n, m / n, 0, 1.0, false};
                break;
            }
        }
        if (!row.flagged) {
            VectorField f = problem.field.clone();
            row.walltime_ns = median_time_ns(options.timing_runs, ref.initial.size(), [&] {
                for (const auto& z0 : ref.initial) solve_dopri5(f, z0, span, row.tolerance, row.tolerance);
            });
        }
        rows.push_back(row);
    }

    for (const auto& method : methods) {
        SpeedupRow row;
        row.solver = method.name();
        auto meets = [&](std::size_t steps) {
            try {
                return evaluate(method, problem, ref, steps).mape <= budget;
            } catch (const Error&) {
                return false;
            }
        };
        if (!meets(options.max_steps)) {
            row.flagged = true;
            row.steps = options.max_steps;
        } else {
            std::size_t lo = 1, hi = options.max_steps;
            while (lo < hi) {
                const std::size_t mid = lo + (hi - lo) / 2;
                if (meets(mid))
                    hi = mid;
                else
                    lo = mid + 1;
            }
            row.steps = lo;
            const Evaluation ev = evaluate(method, problem, ref, lo);
            row.nfe_f = static_cast<double>(ev.nfe_f);
            row.mape = ev.mape;
            VectorField f = problem.field.clone();
            row.walltime_ns = median_time_ns(options.timing_runs, ref.initial.size(), [&] {
                for (const auto& z0 : ref.initial) method.solve(f, z0, span, lo);
            });
        }
        rows.push_back(row);
    }

    const auto& baseline = rows.front();
    for (auto& row : rows) {
        if (row.flagged || baseline.flagged || row.walltime_ns == 0) {
            row.speedup = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.speedup = static_cast<double>(baseline.walltime_ns) / static_cast<double>(row.walltime_ns);
        }
    }
    rows.front().speedup = baseline.flagged ? std::numeric_limits<double>::quiet_NaN() : 1.0;
    return rows;
}

void write_pareto_csv(const std::vector<ParetoRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "solver,K,eps,nfe_f,nfe_g,macs,mape,global_err,walltime_ns\n";
    for (const auto& r : rows)
        out << r.solver << ',' << r.steps << ',' << format_double(r.eps) << ',' << r.nfe_f << ',' << r.nfe_g << ','
            << r.macs << ',' << format_double(r.mape) << ',' << format_double(r.global_err) << ',' << r.walltime_ns
            << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

void write_speedup_csv(const std::vector<SpeedupRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "solver,K,tolerance,nfe_f,mape,walltime_ns,speedup,flagged\n";
    for (const auto& r : rows)
        out << r.solver << ',' << r.steps << ',' << format_double(r.tolerance) << ',' << format_double(r.nfe_f) << ','
            << format_double(r.mape) << ',' << r.walltime_ns << ',' << format_double(r.speedup) << ','
            << (r.flagged ? 1 : 0) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace hyperode::bench
