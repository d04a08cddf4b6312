#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hyperode/bench/method.hpp"
#include "hyperode/problems/problems.hpp"

namespace hyperode::bench {

struct ParetoRow {
    std::string solver;
    std::size_t steps = 0;
    double eps = 0.0;
    std::size_t nfe_f = 0;  // per solve, from the field's counter
    std::size_t nfe_g = 0;  // per solve, corrector evaluations
    std::size_t macs = 0;   // nfe_f * mac_f + nfe_g * mac_g
    double mape = 0.0;        // mean over initial conditions
    double global_err = 0.0;  // mean terminal E_K
    std::uint64_t walltime_ns = 0;  // median per-solve time
    bool failed = false;
    std::string failure;
};

struct SweepOptions {
    double truth_tol = 1e-7;
    std::size_t timing_runs = 5;
    std::size_t jobs = 1;
};

// Initial conditions for `seeds` and their reference terminal states (exact
// flow when available, otherwise dopri5 at `truth_tol`).
struct Reference {
    std::vector<Vector> initial;
    std::vector<Vector> terminal;
};
Reference make_reference(const problems::ProblemSpec& problem, std::span<const std::uint64_t> seeds, double truth_tol);

// Every (method, K) cell averaged over the seeds' initial conditions.
// A failing cell is flagged and the sweep continues. Rows are sorted by MACs.
std::vector<ParetoRow> pareto_sweep(const std::vector<Method>& methods, const problems::ProblemSpec& problem,
                                    std::span<const std::size_t> steps_grid, std::span<const std::uint64_t> seeds,
                                    const SweepOptions& options = {});

struct SpeedupRow {
    std::string solver;
    std::size_t steps = 0;  // minimal K meeting the budget; accepted steps for dopri5
    double tolerance = 0.0; // dopri5 only
    double nfe_f = 0.0;     // mean per solve
    double mape = 0.0;
    std::uint64_t walltime_ns = 0;
    double speedup = 0.0;   // dopri5 wall time / this row's wall time
    bool flagged = false;   // budget unreachable
};

struct SpeedupOptions {
    double truth_tol = 1e-7;
    std::size_t timing_runs = 5;
    std::size_t max_steps = 10'000;
    // dopri5 uses the loosest of these tolerances that meets the budget.
    std::vector<double> dopri5_tolerances{1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9};
};

// Smallest K per method with mean terminal MAPE <= budget (binary search on
// [1, max_steps]) plus a dopri5 row, first in the table.
std::vector<SpeedupRow> speedup_table(const std::vector<Method>& methods, const problems::ProblemSpec& problem,
                                      double budget, std::span<const std::uint64_t> seeds,
                                      const SpeedupOptions& options = {});

// solver,K,eps,nfe_f,nfe_g,macs,mape,global_err,walltime_ns
void write_pareto_csv(const std::vector<ParetoRow>& rows, const std::filesystem::path& path);
// solver,K,tolerance,nfe_f,mape,walltime_ns,speedup,flagged
void write_speedup_csv(const std::vector<SpeedupRow>& rows, const std::filesystem::path& path);

} // namespace hyperode::bench
