#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "hyperode/error.hpp"
#include "hyperode/ode/dopri5.hpp"
#include "hyperode/ode/runge_kutta.hpp"
#include "hyperode/ode/tableau.hpp"
#include "hyperode/ode/trajectory_io.hpp"
#include "support.hpp"

using namespace hyperode;
using hyperode::testing::exponential_field;

TEST_CASE("bundled tableaus are consistent") {
    for (const char* name : {"euler", "midpoint", "heun", "rk4"}) {
        CAPTURE(name);
        const auto tab = tableau_by_name(name);
        CHECK_NOTHROW(validate(tab));
        CHECK(tab.name == name);
    }
    CHECK(tableau_by_name("rk4").order == 4);
    CHECK(tableau_by_name("rk4").stages() == 4);
    CHECK_THROWS_AS(tableau_by_name("rk45"), RangeError);
    CHECK_THROWS_AS(tableau_by_name("alpha:x"), RangeError);
}

TEST_CASE("validate rejects broken tableaus") {
    auto tab = tableau_midpoint();
    tab.b = {0.6, 0.6};
    CHECK_THROWS_AS(validate(tab), RangeError);
    tab = tableau_midpoint();
    tab.a[0][1] = 0.1;
    CHECK_THROWS_AS(validate(tab), RangeError);
    tab = tableau_midpoint();
    tab.c[1] = 0.4;
    CHECK_THROWS_AS(validate(tab), RangeError);
}

TEST_CASE("alpha family covers midpoint and heun") {
    const auto mid = tableau_alpha(0.5);
    const auto heun = tableau_alpha(1.0);
    CHECK(mid.a == tableau_midpoint().a);
    CHECK(mid.b == tableau_midpoint().b);
    CHECK(heun.b == tableau_heun().b);
    CHECK(heun.c == tableau_heun().c);
    CHECK(tableau_by_name("alpha:0.3").alpha == 0.3);
    CHECK(tableau_by_name("alpha:0.3").name == "alpha:0.3");
    CHECK_THROWS_AS(tableau_alpha(0.0), SingularParameterError);
}

TEST_CASE("rk4 single step on the exponential") {
    VectorField f = exponential_field();
    const auto step = rk_step(tableau_rk4(), f, 0.0, Vector{1.0}, 0.1);
    // 1 + h + h^2/2 + h^3/6 + h^4/24
    const double h = 0.1;
    CHECK(step.z_next[0] == doctest::Approx(1.0 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24).epsilon(1e-15));
    CHECK(step.z_next[0] == doctest::Approx(1.1051708333333334).epsilon(1e-15));
    CHECK(step.first_stage[0] == 1.0);
    CHECK(f.nfe() == 4);
}

TEST_CASE("euler reproduces repeated multiplication and counts evaluations") {
    VectorField f = exponential_field();
    const auto traj = solve_fixed(tableau_euler(), f, Vector{1.0}, Span{0.0, 1.0}, 10);
    double expected = 1.0;
    for (int k = 0; k < 10; ++k) expected *= 1.1;
    CHECK(traj.terminal()[0] == doctest::Approx(expected).epsilon(1e-14));
    CHECK(traj.steps() == 10);
    CHECK(f.nfe() == 10);

    f.reset_nfe();
    solve_fixed(tableau_rk4(), f, Vector{1.0}, Span{0.0, 1.0}, 7);
    CHECK(f.nfe() == 28);
}

TEST_CASE("zero field keeps every row at the initial state") {
    VectorField f(2, [](double, std::span<const double>) { return Vector{0.0, 0.0}; });
    const auto traj = solve_fixed(tableau_rk4(), f, Vector{0.5, -1.0}, Span{0.0, 1.0}, 6);
    for (const auto& z : traj.z) CHECK(z == Vector{0.5, -1.0});
}

TEST_CASE("non-finite stage reports its location") {
    VectorField f(1, [](double s, std::span<const double> z) {
        return Vector{s > 0.25 ? std::numeric_limits<double>::infinity() : z[0]};
    });
    try {
        solve_fixed(tableau_midpoint(), f, Vector{1.0}, Span{0.0, 1.0}, 4);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(e.located());
        CHECK(e.s() == doctest::Approx(0.25));
        CHECK(e.stage() == 1);
    }
    CHECK_THROWS_AS(rk_step(tableau_euler(), f, 0.0, Vector{1.0}, 0.0), RangeError);
}

TEST_CASE("vector field counts and checks dimensions") {
    VectorField f = exponential_field();
    CHECK_THROWS_AS(f(0.0, Vector{1.0, 2.0}), DimensionError);
    f(0.0, Vector{1.0});
    VectorField g = f.clone();
    CHECK(f.nfe() == 1);
    CHECK(g.nfe() == 0);
    VectorField no_exact(1, [](double, std::span<const double> z) { return Vector{z[0]}; });
    CHECK_THROWS_AS(no_exact.exact(1.0, Vector{1.0}), UndefinedMetricError);
}

TEST_CASE("dopri5 on a constant state") {
    VectorField f(2, [](double, std::span<const double>) { return Vector{0.0, 0.0}; });
    const auto res = solve_dopri5(f, Vector{0.5, -2.0}, Span{0.0, 1.0}, 1e-6, 1e-6);
    CHECK(res.final_state == Vector{0.5, -2.0});
    CHECK(res.rejected == 0);
    CHECK(res.s.back() == 1.0);
    CHECK(res.nfe == 1 + 6 * res.accepted);
}

TEST_CASE("dopri5 meets its tolerance on the exponential") {
    for (double tol : {1e-5, 1e-7, 1e-9}) {
        CAPTURE(tol);
        VectorField f = exponential_field();
        const auto res = solve_dopri5(f, Vector{1.0}, Span{0.0, 1.0}, tol, tol);
        CHECK(std::abs(res.final_state[0] - std::exp(1.0)) <= 100.0 * (tol + tol * std::exp(1.0)));
        for (double e : res.accepted_errors) CHECK(e <= 1.0);
        CHECK(res.nfe == f.nfe());
        CHECK(res.nfe == 1 + 6 * (res.accepted + res.rejected));
    }
}

TEST_CASE("dopri5 gives up on finite-time blow-up") {
    // z' = z^2, z0 = 1 blows up at s = 1.
    VectorField f(1, [](double, std::span<const double> z) { return Vector{z[0] * z[0]}; });
    CHECK_THROWS_AS(solve_dopri5(f, Vector{1.0}, Span{0.0, 2.0}, 1e-6, 1e-6), Error);
}

TEST_CASE("segment-restarted reference agrees across meshes") {
    VectorField f(2, [](double, std::span<const double> z) { return Vector{z[1], (1 - z[0] * z[0]) * z[1] - z[0]}; });
    const Vector z0{1.5, -0.3};
    const auto coarse = solve_reference(f, z0, Span{0.0, 2.0}, 4);
    const auto fine = solve_reference(f, z0, Span{0.0, 2.0}, 8);
    for (std::size_t k = 0; k <= 4; ++k) {
        CHECK(coarse.s[k] == fine.s[2 * k]);
        for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(coarse.z[k][i] - fine.z[2 * k][i]) < 1e-6);
    }
}

TEST_CASE("mesh helpers") {
    const auto mesh = uniform_mesh(Span{0.0, 1.0}, 4);
    CHECK(mesh == Vector{0.0, 0.25, 0.5, 0.75, 1.0});
    Trajectory t{{0.0, 0.3, 1.0}, {{1.0}, {1.0}, {1.0}}};
    CHECK_THROWS_AS(t.require_uniform(), MeshError);
    VectorField f = exponential_field();
    const auto exact = exact_trajectory(f, Vector{2.0}, Span{0.0, 1.0}, 2);
    CHECK(exact.z[1][0] == doctest::Approx(2.0 * std::exp(0.5)));
}

TEST_CASE("trajectory files round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "hyperode_solvers_test";
    std::filesystem::create_directories(dir);
    VectorField f = exponential_field();
    const auto traj = solve_fixed(tableau_rk4(), f, Vector{1.0 / 3.0}, Span{0.0, 1.0}, 5);
    write_trajectory_csv(traj, dir / "t.csv");
    const auto back = read_trajectory_csv(dir / "t.csv");
    CHECK(back.s == traj.s);
    CHECK(back.z == traj.z);

    const TrajectoryManifest m{"linear1", "dopri5", 5, Span{0.0, 1.0}, 42, 77};
    write_manifest(m, dir / "t.json");
    const auto mb = read_manifest(dir / "t.json");
    CHECK(mb.problem == "linear1");
    CHECK(mb.steps == 5);
    CHECK(mb.seed == 42);
    CHECK(mb.nfe == 77);
    CHECK_THROWS_AS(read_trajectory_csv(dir / "missing.csv"), IoError);
    std::filesystem::remove_all(dir);
}
