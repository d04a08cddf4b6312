#include <doctest.h>

#include <cmath>
#include <limits>

#include "hyperode/bench/method.hpp"
#include "hyperode/bench/metrics.hpp"
#include "hyperode/bench/sweep.hpp"
#include "hyperode/error.hpp"
#include "hyperode/hyper/losses.hpp"
#include "hyperode/ode/runge_kutta.hpp"
#include "hyperode/problems/problems.hpp"
#include "support.hpp"

using namespace hyperode;
using namespace hyperode::bench;
using hyperode::testing::exponential_field;

TEST_CASE("local error of euler on the exponential") {
    VectorField f = exponential_field();
    const auto truth = exact_trajectory(f, Vector{1.0}, Span{0.0, 1.0}, 10);
    const auto e = local_errors(tableau_euler(), f, truth);
    REQUIRE(e.size() == 10);
    CHECK(e[0] == doctest::Approx(std::exp(0.1) - 1.1).epsilon(1e-12));
    CHECK(e[0] == doctest::Approx(0.0051709180756).epsilon(1e-9));
    for (double x : e) CHECK(x >= 0.0);
}

TEST_CASE("hypersolver local error equals the scaled residual gap") {
    auto problem = problems::problem_random_mlp(3, 16, 2);
    VectorField f = problem.field.clone();
    const auto truth = solve_fixed(tableau_rk4(), f, problem.sample_ic(0), Span{0.0, 1.0}, 8);
    auto hs = Hypersolver::create(tableau_midpoint(), 3, {8}, nn::Activation::prelu, 3);
    const auto e = local_errors(hs, f, truth);
    const auto ds = build_residual_dataset(tableau_midpoint(), f, truth);
    const double scale = std::pow(truth.step_size(), 3);
    for (std::size_t k = 0; k < e.size(); ++k) {
        const auto& r = ds.records[k];
        const Vector g = hs.correction(r.s, r.eps, r.z, r.fz);
        const double expected = scale * norm2(difference(r.residual, g));
        CHECK(e[k] == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("global errors") {
    VectorField f = exponential_field();
    const auto truth = exact_trajectory(f, Vector{1.0}, Span{0.0, 1.0}, 10);
    CHECK(global_errors(truth, truth) == Vector(11, 0.0));

    Trajectory shifted = truth;
    for (auto& z : shifted.z) z[0] += 0.25;
    for (double x : global_errors(shifted, truth)) CHECK(x == doctest::Approx(0.25));

    const auto euler = solve_fixed(tableau_euler(), f, Vector{1.0}, Span{0.0, 1.0}, 10);
    const auto E = global_errors(euler, truth);
    CHECK(E.front() == 0.0);
    CHECK(E.back() == doctest::Approx(std::exp(1.0) - std::pow(1.1, 10)).epsilon(1e-12));
    CHECK(E.back() == doctest::Approx(0.1245393).epsilon(1e-6));

    const auto other = exact_trajectory(f, Vector{1.0}, Span{0.0, 1.0}, 5);
    CHECK_THROWS_AS(global_errors(other, truth), MeshError);
}

TEST_CASE("mape examples") {
    CHECK(mape(Vector{1.0, 2.0}, Vector{1.0, 2.0}).value == 0.0);
    CHECK(mape(Vector{1.0, 2.0}, Vector{2.0, 4.0}).value == doctest::Approx(50.0));
    const auto r = mape(Vector{1.0, 5.0, 3.0}, Vector{1.0, 0.0, 3.0});
    CHECK(r.value == 0.0);
    CHECK(r.excluded == 1);
    CHECK_THROWS_AS(mape(Vector{1.0, 1.0}, Vector{0.0, 0.0}), UndefinedMetricError);
}

TEST_CASE("relative overhead") {
    CHECK(relative_overhead(1, 0.04, 0.02) == doctest::Approx(1.5));
    CHECK(relative_overhead(1, 4e7, 2e7) == 1.5);
    CHECK(relative_overhead(3, 10, 0) == 1.0);
    double prev = relative_overhead(1, 1, 2);
    for (std::size_t p = 2; p <= 64; ++p) {
        const double o = relative_overhead(p, 1, 2);
        CHECK(o < prev);
        CHECK(o > 1.0);
        prev = o;
    }
    CHECK_THROWS_AS(relative_overhead(0, 1, 1), RangeError);
}

TEST_CASE("error report accounting") {
    auto problem = problems::problem_by_name("linear1");
    VectorField f = problem.field.clone();
    const auto truth = exact_trajectory(f, Vector{0.5}, Span{0.0, 1.0}, 10);
    const auto method = Method::hyper(Hypersolver::create(tableau_midpoint(), 1, {4}, nn::Activation::tanh, 0));
    const auto r = error_report(method, f, truth, problem.mac_f);
    CHECK(r.nfe_f == 20);
    CHECK(r.nfe_g == 10);
    CHECK(r.mac_g == 3 * 4 + 4 * 1);
    CHECK(r.local.size() == 10);
    CHECK(r.global.size() == 11);
    CHECK(r.global.front() == 0.0);
    CHECK(method.name() == "hyper-midpoint");
}

TEST_CASE("order slopes of the bundled methods") {
    auto problem = problems::problem_by_name("linear1");
    Vector eps;
    for (int j = 3; j <= 10; ++j) eps.push_back(std::ldexp(1.0, -j));
    const Vector z0{1.0};
    struct Case {
        const char* name;
        double order;
    };
    for (auto [name, order] : {Case{"euler", 1}, Case{"midpoint", 2}, Case{"heun", 2}, Case{"alpha:0.3", 2},
                               Case{"alpha:0.7", 2}, Case{"rk4", 4}}) {
        CAPTURE(name);
        const auto fit = order_slope(Method::plain(tableau_by_name(name)), problem, z0, eps);
        CHECK(std::abs(fit.slope - order) < 0.15);
        CHECK(fit.r2 > 0.99);
    }
    CHECK_THROWS_AS(order_slope(Method::plain(tableau_euler()), problem, z0, Vector{0.1, 0.05}), RangeError);
}

TEST_CASE("exact oracle solver gives a degenerate fit") {
    auto problem = problems::problem_by_name("linear1");
    SolveFn oracle = [](VectorField& f, std::span<const double> z0, Span span, std::size_t steps) {
        return exact_trajectory(f, z0, span, steps);
    };
    const Vector eps{0.1, 0.01, 0.001};
    const auto fit = order_slope(oracle, problem, Vector{1.0}, eps);
    CHECK(fit.degenerate);
    CHECK(fit.truncated);
    CHECK(std::isnan(fit.slope));
}

TEST_CASE("pareto sweep accounting and ordering") {
    auto problem = problems::problem_by_name("linear1");
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    const std::vector<std::size_t> one{7};
    const auto single = pareto_sweep({Method::plain(tableau_midpoint())}, problem, one, seeds, {1e-7, 1, 1});
    REQUIRE(single.size() == 1);
    CHECK(single[0].macs == 7 * 2 * problem.mac_f);
    CHECK(single[0].nfe_f == 14);

    const std::vector<std::size_t> grid{10, 20};
    const auto rows = pareto_sweep({Method::plain(tableau_euler())}, problem, grid, seeds, {1e-7, 1, 1});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].steps == 10);
    CHECK(rows[1].macs == 2 * rows[0].macs);
    CHECK(rows[1].mape < rows[0].mape);

    const std::vector<Method> methods{Method::plain(tableau_rk4()), Method::plain(tableau_euler()),
                                      Method::hyper(Hypersolver::create(tableau_euler(), 1, {4},
                                                                        nn::Activation::tanh, 0))};
    const std::vector<std::size_t> ks{5, 10, 20};
    const auto serial = pareto_sweep(methods, problem, ks, seeds, {1e-7, 1, 1});
    const auto parallel = pareto_sweep(methods, problem, ks, seeds, {1e-7, 1, 3});
    REQUIRE(serial.size() == 9);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].solver == parallel[i].solver);
        CHECK(serial[i].steps == parallel[i].steps);
        CHECK(serial[i].mape == parallel[i].mape);
        CHECK(serial[i].macs == parallel[i].macs);
        if (i > 0) CHECK(serial[i - 1].macs <= serial[i].macs);
    }
}

TEST_CASE("failing sweep cells are flagged") {
    auto problem = problems::problem_by_name("linear1");
    problem.field = VectorField(
        1,
        [](double s, std::span<const double> z) {
            return Vector{s > 0.5 ? std::numeric_limits<double>::quiet_NaN() : z[0]};
        },
        [](double s, std::span<const double> z0) { return Vector{std::exp(s) * z0[0]}; });
    const std::vector<std::uint64_t> seeds{0};
    const std::vector<std::size_t> ks{1, 4};
    const auto rows = pareto_sweep({Method::plain(tableau_euler())}, problem, ks, seeds);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].failed);
    CHECK(rows[1].failed);
}

TEST_CASE("speedup table") {
    auto problem = problems::problem_by_name("linear1");
    const std::vector<std::uint64_t> seeds{0, 1};
    const std::vector<Method> methods{Method::plain(tableau_euler()), Method::plain(tableau_rk4())};
    SpeedupOptions opts;
    opts.timing_runs = 1;

    const auto vacuous = speedup_table(methods, problem, std::numeric_limits<double>::infinity(), seeds, opts);
    REQUIRE(vacuous.size() == 3);
    CHECK(vacuous[0].solver == "dopri5");
    CHECK(vacuous[0].speedup == 1.0);
    CHECK(vacuous[1].steps == 1);
    CHECK(vacuous[2].steps == 1);

    const auto rows = speedup_table(methods, problem, 0.1, seeds, opts);
    CHECK(rows[0].speedup == 1.0);
    CHECK_FALSE(rows[1].flagged);
    CHECK(rows[1].mape <= 0.1);
    CHECK(rows[2].steps < rows[1].steps);

    opts.max_steps = 4;
    const auto capped = speedup_table({Method::plain(tableau_euler())}, problem, 1e-6, seeds, opts);
    CHECK(capped[1].flagged);
}
