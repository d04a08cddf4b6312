#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyperode/bench/metrics.hpp"
#include "hyperode/bench/sweep.hpp"
#include "hyperode/error.hpp"
#include "hyperode/format.hpp"
#include "hyperode/hyper/bundle.hpp"
#include "hyperode/ode/dopri5.hpp"
#include "hyperode/ode/trajectory_io.hpp"
#include "hyperode/problems/problems.hpp"
#include "hyperode/random.hpp"

namespace hyperode::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Usage problems detected after CLI11 has accepted the command line.
struct UsageError : Error {
    using Error::Error;
};

struct RunOptions {
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::string problem = "linear1";
    std::vector<std::string> solvers;
    std::vector<double> span;
    std::vector<std::size_t> steps;
    std::string seeds = "0..31";
    double tol = 1e-7;
    std::string out = ".";
    std::size_t timing_runs = 5;

    // train
    std::string base = "euler";
    std::vector<std::size_t> hidden{32, 32};
    std::string activation = "prelu";
    bool include_s = false;
    TrainConfig train;
    std::string loss = "residual";

    // order / speedup / show
    std::vector<double> eps;
    double budget = 0.1;
    std::string bundle;
};

std::uint64_t parse_u64(const std::string& text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw UsageError("bad seed '" + text + "'");
    return v;
}

problems::ProblemSpec load_problem(const RunOptions& o) {
    problems::ProblemSpec p = [&] {
        try {
            return problems::problem_by_name(o.problem);
        } catch (const RangeError& e) {
            throw UsageError(e.what());
        }
    }();
    if (!o.span.empty()) {
        if (o.span.size() != 2 || !(o.span[1] > o.span[0])) throw UsageError("--span needs two increasing values");
        p.span_default = Span{o.span[0], o.span[1]};
    }
    return p;
}

std::vector<std::uint64_t> eval_seeds(const RunOptions& o) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t k : parse_seed_list(o.seeds)) out.push_back(eval_seed(o.seed, k));
    return out;
}

std::vector<std::size_t> steps_or(const RunOptions& o, std::vector<std::size_t> fallback) {
    auto steps = o.steps.empty() ? std::move(fallback) : o.steps;
    for (std::size_t k : steps)
        if (k == 0) throw UsageError("--K values must be >= 1");
    return steps;
}

std::size_t single_steps(const RunOptions& o, std::size_t fallback) {
    const auto steps = steps_or(o, {fallback});
    if (steps.size() != 1) throw UsageError("this command takes a single --K");
    return steps.front();
}

struct ResolvedSolver {
    bench::Method method;
    std::string bundle_dir;  // empty for plain tableaus
};

// Tableau name, `alpha:<v>`, a bundle directory, or `<bundle>#<tableau>`.
ResolvedSolver resolve_solver(const std::string& spec) {
    const auto hash = spec.find('#');
    const std::string head = spec.substr(0, hash);
    if (hash == std::string::npos && !fs::is_directory(head)) {
        try {
            return {bench::Method::plain(tableau_by_name(head)), {}};
        } catch (const RangeError&) {
            throw UsageError("unknown solver or missing bundle '" + spec + "'");
        }
    }
    if (!fs::is_directory(head)) throw UsageError("missing bundle '" + head + "'");
    Bundle b = load_bundle(head);
    Hypersolver hs = std::move(b.solver);
    if (hash != std::string::npos) {
        try {
            hs = hs.with_base(tableau_by_name(spec.substr(hash + 1)));
        } catch (const RangeError& e) {
            throw UsageError(e.what());
        }
    }
    return {bench::Method::hyper(std::move(hs)), head};
}

std::vector<ResolvedSolver> resolve_solvers(const RunOptions& o, bool allow_dopri5 = false) {
    if (o.solvers.empty()) throw UsageError("at least one --solver is required");
    std::vector<ResolvedSolver> out;
    for (const auto& spec : o.solvers) {
        if (spec == "dopri5") {
            if (!allow_dopri5) throw UsageError("dopri5 is only available in speedup");
            continue;
        }
        out.push_back(resolve_solver(spec));
    }
    return out;
}

std::vector<bench::Method> methods_of(const std::vector<ResolvedSolver>& solvers) {
    std::vector<bench::Method> out;
    for (const auto& s : solvers) out.push_back(s.method);
    return out;
}

fs::path prepare_out(const RunOptions& o) {
    fs::path dir(o.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw IoError("cannot write " + path.string());
}

json manifest_base(const std::string& command, const RunOptions& o, const problems::ProblemSpec& problem,
                   const std::vector<ResolvedSolver>& solvers) {
    json solver_docs = json::array();
    for (const auto& s : solvers) {
        json doc{{"name", s.method.name()}};
        if (!s.bundle_dir.empty()) {
            doc["bundle"] = s.bundle_dir;
            doc["bundle_hash"] = bundle_hash(s.bundle_dir);
        }
        solver_docs.push_back(std::move(doc));
    }
    return json{{"command", command},
                {"problem", problem.name},
                {"span", {problem.span_default.begin, problem.span_default.end}},
                {"root_seed", o.seed},
                {"seeds", parse_seed_list(o.seeds)},
                {"truth_tol", o.tol},
                {"solvers", std::move(solver_docs)}};
}

int cmd_gen(const RunOptions& o, std::ostream& out) {
    const auto problem = load_problem(o);
    const std::size_t steps = single_steps(o, 10);
    const auto seeds = parse_seed_list(o.seeds);
    const fs::path dir = prepare_out(o);
    for (std::uint64_t k : seeds) {
        VectorField f = problem.field.clone();
        const Vector z0 = problem.sample_ic(eval_seed(o.seed, k));
        const Trajectory traj = solve_reference(f, z0, problem.span_default, steps, o.tol);
        const std::string stem = problem.name + "_seed" + std::to_string(k);
        write_trajectory_csv(traj, dir / (stem + ".csv"));
        write_manifest({problem.name, "dopri5", steps, problem.span_default, k, f.nfe()}, dir / (stem + ".json"));
    }
    out << "wrote " << seeds.size() << " trajectories to " << dir.string() << '\n';
    return kOk;
}

int cmd_train(RunOptions o, std::ostream& out) {
    const auto problem = load_problem(o);
    TrainConfig cfg = o.train;
    cfg.seed = o.seed;
    cfg.span = problem.span_default;
    cfg.steps = steps_or(o, {10});
    cfg.truth_tol = o.tol;
    try {
        cfg.loss = parse_loss_kind(o.loss);
        validate(cfg);
    } catch (const RangeError& e) {
        throw UsageError(e.what());
    }
    ButcherTableau base = [&] {
        try {
            return tableau_by_name(o.base);
        } catch (const RangeError& e) {
            throw UsageError(e.what());
        }
    }();
    nn::Activation act = [&] {
        try {
            return nn::parse_activation(o.activation);
        } catch (const RangeError& e) {
            throw UsageError(e.what());
        }
    }();

    Hypersolver init = Hypersolver::create(std::move(base), problem.dim, o.hidden, act,
                                           derive_seed(o.seed, "init"), o.include_s);
    TrainResult result = train(std::move(init), {problem.training_problem()}, cfg);

    const fs::path dir = prepare_out(o);
    save_bundle(Bundle{result.solver, problem.name, cfg, result.delta}, dir);
    std::ostringstream hist;
    hist << "iteration,loss,lr\n";
    for (std::size_t i = 0; i < result.loss_history.size(); ++i)
        hist << i << ',' << format_double(result.loss_history[i]) << ',' << format_double(result.lr_history[i]) << '\n';
    write_text(dir / "loss_history.csv", hist.str());
    out << "delta " << format_double(result.delta) << '\n';
    return kOk;
}

int cmd_bench(const RunOptions& o, std::ostream& out) {
    const auto problem = load_problem(o);
    const auto solvers = resolve_solvers(o);
    const std::size_t steps = single_steps(o, 10);
    const auto seeds = parse_seed_list(o.seeds);
    const fs::path dir = prepare_out(o);

    std::ostringstream summary, errors;
    summary << "solver,seed,K,eps,nfe_f,nfe_g,macs,mape,max_local,global_terminal\n";
    errors << "solver,seed,k,s,local,global\n";
    for (const auto& solver : solvers) {
        double mean_mape = 0.0;
        for (std::uint64_t k : seeds) {
            VectorField f = problem.field.clone();
            const Vector z0 = problem.sample_ic(eval_seed(o.seed, k));
            const Trajectory truth = problem.has_exact()
                                         ? exact_trajectory(f, z0, problem.span_default, steps)
                                         : solve_reference(f, z0, problem.span_default, steps, o.tol);
            f.reset_nfe();
            const auto r = bench::error_report(solver.method, f, truth, problem.mac_f);
            const double max_local = r.local.empty() ? 0.0 : *std::max_element(r.local.begin(), r.local.end());
            summary << solver.method.name() << ',' << k << ',' << steps << ',' << format_double(truth.step_size())
                    << ',' << r.nfe_f << ',' << r.nfe_g << ',' << r.nfe_f * r.mac_f + r.nfe_g * r.mac_g << ','
                    << format_double(r.mape) << ',' << format_double(max_local) << ','
                    << format_double(r.global.back()) << '\n';
            for (std::size_t i = 0; i < r.global.size(); ++i) {
                errors << solver.method.name() << ',' << k << ',' << i << ',' << format_double(truth.s[i]) << ',';
                if (i < r.local.size()) errors << format_double(r.local[i]);
                errors << ',' << format_double(r.global[i]) << '\n';
            }
            mean_mape += r.mape / static_cast<double>(seeds.size());
        }
        out << solver.method.name() << " K=" << steps << " mean MAPE " << format_double(mean_mape) << '\n';
    }
    write_text(dir / "bench.csv", summary.str());
    write_text(dir / "errors.csv", errors.str());
    json manifest = manifest_base("bench", o, problem, solvers);
    manifest["K"] = steps;
    write_text(dir / "bench.json", manifest.dump(2) + "\n");
    return kOk;
}

int cmd_pareto(const RunOptions& o, std::ostream& out, std::ostream& err) {
    const auto problem = load_problem(o);
    const auto solvers = resolve_solvers(o);
    const auto steps = steps_or(o, {5, 10, 20, 40});
    const auto seeds = eval_seeds(o);
    const fs::path dir = prepare_out(o);

    const auto rows = bench::pareto_sweep(methods_of(solvers), problem, steps, seeds,
                                          {o.tol, o.timing_runs, o.jobs});
    bench::write_pareto_csv(rows, dir / "pareto.csv");
    json manifest = manifest_base("pareto", o, problem, solvers);
    manifest["K"] = steps;
    write_text(dir / "pareto.json", manifest.dump(2) + "\n");
    for (const auto& r : rows) {
        if (r.failed) err << "warning: " << r.solver << " K=" << r.steps << " failed: " << r.failure << '\n';
    }
    out << "wrote " << rows.size() << " rows to " << (dir / "pareto.csv").string() << '\n';
    return kOk;
}

int cmd_order(const RunOptions& o, std::ostream& out) {
    const auto problem = load_problem(o);
    const auto solvers = resolve_solvers(o);
    std::vector<double> eps = o.eps;
    if (eps.empty())
        for (int j = 3; j <= 10; ++j) eps.push_back(std::ldexp(1.0, -j));
    const auto seeds = parse_seed_list(o.seeds);
    const Vector z0 = problem.sample_ic(eval_seed(o.seed, seeds.front()));
    const fs::path dir = prepare_out(o);

    std::ostringstream points, fits;
    points << "solver,eps,K,error,used\n";
    fits << "solver,slope,intercept,r2,points_used,truncated,degenerate\n";
    for (const auto& solver : solvers) {
        const auto fit = [&] {
            try {
                return bench::order_slope(solver.method, problem, z0, eps);
            } catch (const RangeError& e) {
                throw UsageError(e.what());
            }
        }();
        for (const auto& p : fit.points)
            points << solver.method.name() << ',' << format_double(p.eps) << ',' << p.steps << ','
                   << format_double(p.error) << ',' << (p.used ? 1 : 0) << '\n';
        fits << solver.method.name() << ',' << format_double(fit.slope) << ',' << format_double(fit.intercept) << ','
             << format_double(fit.r2) << ',' << fit.used << ',' << (fit.truncated ? 1 : 0) << ','
             << (fit.degenerate ? 1 : 0) << '\n';
        out << solver.method.name() << " slope " << format_double(fit.slope) << " r2 " << format_double(fit.r2)
            << (fit.truncated ? " (truncated grid)" : "") << '\n';
    }
    write_text(dir / "order.csv", points.str());
    write_text(dir / "order_fit.csv", fits.str());
    json manifest = manifest_base("order", o, problem, solvers);
    manifest["eps"] = eps;
    write_text(dir / "order.json", manifest.dump(2) + "\n");
    return kOk;
}

int cmd_speedup(const RunOptions& o, std::ostream& out) {
    const auto problem = load_problem(o);
    const auto solvers = resolve_solvers(o, true);
    const auto seeds = eval_seeds(o);
    const fs::path dir = prepare_out(o);

    bench::SpeedupOptions opts;
    opts.truth_tol = o.tol;
    opts.timing_runs = o.timing_runs;
    const auto rows = bench::speedup_table(methods_of(solvers), problem, o.budget, seeds, opts);
    bench::write_speedup_csv(rows, dir / "speedup.csv");
    json manifest = manifest_base("speedup", o, problem, solvers);
    manifest["budget"] = o.budget;
    write_text(dir / "speedup.json", manifest.dump(2) + "\n");
    for (const auto& r : rows) {
        out << r.solver << " K=" << r.steps << " nfe=" << format_double(r.nfe_f);
        if (r.flagged)
            out << " budget unreachable";
        else
            out << " speedup " << format_double(r.speedup);
        out << '\n';
    }
    return kOk;
}

int cmd_show(const RunOptions& o, std::ostream& out) {
    if (o.bundle.empty()) throw UsageError("show needs a bundle directory");
    if (!fs::is_directory(o.bundle)) throw UsageError("missing bundle '" + o.bundle + "'");
    const Bundle b = load_bundle(o.bundle);
    const auto& net = b.solver.corrector();
    out << "bundle      " << o.bundle << '\n';
    out << "hash        " << bundle_hash(o.bundle) << '\n';
    out << "problem     " << b.problem << '\n';
    out << "base        " << b.solver.base().name << " (order " << b.solver.order() << ")\n";
    out << "corrector   [";
    const auto& dims = net.layout().dims();
    for (std::size_t i = 0; i < dims.size(); ++i) out << (i ? ", " : "") << dims[i];
    out << "] " << nn::to_string(net.layout().activation()) << ", " << net.params().size() << " parameters, "
        << net.mac_count() << " MACs\n";
    out << "inputs      z, f(s,z), eps" << (b.solver.layout().include_s ? ", s" : "") << '\n';
    out << "delta       " << format_double(b.delta) << '\n';
    out << "training    " << to_json(b.config).dump() << '\n';
    return kOk;
}

void add_run_options(CLI::App& app, RunOptions& o) {
    app.add_option("--seed", o.seed, "Root seed (HYPERODE_SEED overrides the config file)")->capture_default_str();
    app.add_option("--jobs", o.jobs, "Parallel sweep cells")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--problem", o.problem, "linear1, rotation2, vdp1 or mlp-d<dim>-s<seed>")->capture_default_str();
    app.add_option("--solver", o.solvers, "Tableau name, alpha:<v>, bundle dir or <bundle>#<tableau>")
        ->delimiter(',');
    app.add_option("--span", o.span, "Integration interval s0,s1")->delimiter(',')->expected(2);
    app.add_option("--K", o.steps, "Step count(s)")->delimiter(',');
    app.add_option("--seeds", o.seeds, "Initial-condition indices, a..b or a,b,c")->capture_default_str();
    app.add_option("--tol", o.tol, "Ground-truth dopri5 tolerance")->capture_default_str();
    app.add_option("--out", o.out, "Output directory")->capture_default_str();
    app.add_option("--timing-runs", o.timing_runs, "Timed repetitions per cell")->capture_default_str();
}

} // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t lo = parse_u64(text.substr(0, dots));
        const std::uint64_t hi = parse_u64(text.substr(dots + 2));
        if (hi < lo) throw UsageError("empty seed range '" + text + "'");
        for (std::uint64_t k = lo; k <= hi; ++k) out.push_back(k);
    } else {
        std::stringstream ss(text);
        for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_u64(item));
    }
    if (out.empty()) throw UsageError("no seeds given");
    return out;
}

std::uint64_t eval_seed(std::uint64_t root, std::uint64_t k) {
    return splitmix64(derive_seed(root, "eval") + k);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunOptions o;
    CLI::App app{"Hypersolver training and benchmarking", "hyperode"};
    app.set_config("--config", "", "TOML run configuration; flags override it");
    app.require_subcommand(1, 1);
    add_run_options(app, o);

    auto* gen = app.add_subcommand("gen", "Write ground-truth trajectories");
    auto* tr = app.add_subcommand("train", "Train a hypersolver bundle");
    auto* bench = app.add_subcommand("bench", "Local and global errors per solver");
    auto* pareto = app.add_subcommand("pareto", "MAPE versus MACs sweep");
    auto* order = app.add_subcommand("order", "Convergence-order fit");
    auto* speedup = app.add_subcommand("speedup", "Minimal steps under a MAPE budget");
    auto* show = app.add_subcommand("show", "Describe a bundle");
    for (auto* sub : {gen, tr, bench, pareto, order, speedup, show}) sub->fallthrough();

    tr->add_option("--base", o.base, "Base tableau")->capture_default_str();
    tr->add_option("--hidden", o.hidden, "Corrector hidden widths")->delimiter(',');
    tr->add_option("--activation", o.activation, "tanh, softplus or prelu")->capture_default_str();
    tr->add_flag("--include-s", o.include_s, "Feed the depth variable s to the corrector");
    tr->add_option("--iterations", o.train.iterations)->capture_default_str();
    tr->add_option("--lr-max", o.train.lr_max)->capture_default_str();
    tr->add_option("--lr-min", o.train.lr_min)->capture_default_str();
    tr->add_option("--weight-decay", o.train.weight_decay)->capture_default_str();
    tr->add_option("--batch-size", o.train.batch_size)->capture_default_str();
    tr->add_option("--pool-batches", o.train.pool_batches)->capture_default_str();
    tr->add_option("--swap-every", o.train.batch_swap_every)->capture_default_str();
    tr->add_option("--pretrain", o.train.pretrain_iters)->capture_default_str();
    tr->add_option("--loss", o.loss, "residual, trajectory or combined")->capture_default_str();
    tr->add_option("--lambda", o.train.lambda, "Trajectory weight in the combined loss")->capture_default_str();
    order->add_option("--eps", o.eps, "Step sizes (default 2^-3..2^-10)")->delimiter(',');
    speedup->add_option("--budget", o.budget, "Terminal MAPE budget in percent")->capture_default_str();
    show->add_option("bundle", o.bundle, "Bundle directory")->required();

    // Precedence: --seed flag, then HYPERODE_SEED, then the config file.
    std::vector<std::string> full = args;
    const bool seed_flag = std::any_of(args.begin(), args.end(),
                                       [](const std::string& a) { return a == "--seed" || a.starts_with("--seed="); });
    if (const char* env = std::getenv("HYPERODE_SEED"); env != nullptr && !seed_flag) {
        full.push_back("--seed");
        full.push_back(env);
    }
    std::vector<const char*> argv{"hyperode"};
    for (const auto& a : full) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        int code = kOk;
        if (*gen) code = cmd_gen(o, out);
        else if (*tr) code = cmd_train(o, out);
        else if (*bench) code = cmd_bench(o, out);
        else if (*pareto) code = cmd_pareto(o, out, err);
        else if (*order) code = cmd_order(o, out);
        else if (*speedup) code = cmd_speedup(o, out);
        else code = cmd_show(o, out);
        if (!*show) {
            const std::string command = app.get_subcommands().front()->get_name();
            write_text(fs::path(o.out) / "run.toml",
                       "# hyperode " + command + " --config run.toml\n" + app.config_to_str(false, false));
        }
        return code;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const TrainingFailure& e) {
        err << "training failed at iteration " << e.iteration() << ": " << e.what() << '\n';
        return kNumeric;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const SolverFailure& e) {
        err << "solver failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const UndefinedMetricError& e) {
        err << "undefined metric: " << e.what() << '\n';
        return kNumeric;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kNumeric;
    }
}

} // namespace hyperode::cli
