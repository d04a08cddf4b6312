#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "hyperode/error.hpp"
#include "hyperode/hyper/bundle.hpp"
#include "hyperode/hyper/hypersolver.hpp"
#include "hyperode/hyper/losses.hpp"
#include "hyperode/hyper/sensitivity.hpp"
#include "hyperode/hyper/train.hpp"
#include "hyperode/ode/runge_kutta.hpp"
#include "hyperode/problems/problems.hpp"
#include "support.hpp"

using namespace hyperode;
using hyperode::testing::central_differences;
using hyperode::testing::exponential_field;
using hyperode::testing::random_vector;
using hyperode::testing::relative_error;

namespace {

Vector zero_correction(const CorrectionQuery& q) { return Vector(q.z.size(), 0.0); }

} // namespace

TEST_CASE("input layout concatenates z, f, eps and optionally s") {
    InputLayout l{2, false};
    CHECK(l.width() == 5);
    CHECK(l.assemble(Vector{1, 2}, Vector{3, 4}, 0.1, 7.0) == Vector{1, 2, 3, 4, 0.1});
    InputLayout ls{2, true};
    CHECK(ls.assemble(Vector{1, 2}, Vector{3, 4}, 0.1, 7.0) == Vector{1, 2, 3, 4, 0.1, 7.0});
    CHECK_THROWS_AS(l.assemble(Vector{1}, Vector{3, 4}, 0.1, 0.0), DimensionError);
}

TEST_CASE("zero correction leaves the base step untouched") {
    for (const char* name : {"euler", "midpoint", "rk4"}) {
        VectorField f = exponential_field();
        const auto tab = tableau_by_name(name);
        const auto hs = hyper_step(tab, f, 0.0, Vector{0.7}, 0.1, zero_correction);
        CHECK(f.nfe() == tab.stages());
        const auto rk = rk_step(tab, f, 0.0, Vector{0.7}, 0.1);
        CHECK(hs.z_next == rk.z_next);
        CHECK(hs.fz == rk.first_stage);
    }
}

TEST_CASE("exact residual as correction recovers the flow") {
    VectorField f = exponential_field();
    const auto tab = tableau_midpoint();
    const double eps = 0.2;
    auto oracle = [&](const CorrectionQuery& q) {
        VectorField g = exponential_field();
        const auto rk = rk_step(tab, g, q.s, q.z, q.eps);
        return Vector{(std::exp(q.eps) * q.z[0] - q.z[0] - q.eps * rk.psi[0]) / std::pow(q.eps, 3)};
    };
    Vector z{1.0};
    for (int k = 0; k < 5; ++k) z = hyper_step(tab, f, k * eps, z, eps, oracle).z_next;
    CHECK(std::abs(z[0] - std::exp(1.0)) < 1e-12);
}

TEST_CASE("base residual of euler and heun on the exponential") {
    VectorField f = exponential_field();
    const auto truth = exact_trajectory(f, Vector{1.0}, Span{0.0, 1.0}, 10);
    const auto euler = base_residuals(tableau_euler(), f, truth);
    const double h = 0.1;
    CHECK(std::abs(euler[0][0] - (std::exp(h) - 1.0 - h) / (h * h)) < 1e-12);
    CHECK(std::abs(euler[0][0] - 0.5170918075647624) < 1e-12);
    // R_k scales with z(s_k) on a linear problem.
    CHECK(euler[3][0] == doctest::Approx(euler[0][0] * std::exp(0.3)).epsilon(1e-10));

    const auto heun = base_residuals(tableau_heun(), f, truth);
    CHECK(std::abs(heun[0][0] - (std::exp(h) - 1.0 - h - h * h / 2.0) / (h * h * h)) < 1e-9);
    CHECK(heun[0][0] == doctest::Approx(0.1709180756).epsilon(1e-8));
}

TEST_CASE("hypersolver construction and accounting") {
    auto hs = Hypersolver::create(tableau_midpoint(), 3, {8}, nn::Activation::tanh, 1);
    CHECK(hs.corrector().input_dim() == 7);
    CHECK(hs.corrector().output_dim() == 3);
    CHECK_THROWS_AS(Hypersolver(tableau_euler(), nn::Mlp::init({6, 3}, nn::Activation::tanh, 0), InputLayout{3}),
                    DimensionError);
    CHECK_THROWS_AS(hs.with_base(tableau_rk4()), RangeError);
    CHECK(hs.with_base(tableau_alpha(0.3)).base().name == "alpha:0.3");

    auto problem = problems::problem_random_mlp(3, 16, 1);
    VectorField f = problem.field.clone();
    const auto traj = hyper_solve(hs, f, problem.sample_ic(0), Span{0.0, 1.0}, 12);
    CHECK(traj.steps() == 12);
    CHECK(f.nfe() == 24);
    CHECK(hs.corrector_evals() == 12);
}

TEST_CASE("residual loss gradient matches central differences") {
    auto problem = problems::problem_random_mlp(2, 8, 3);
    ResidualDataset ds;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        VectorField g = problem.field.clone();
        // Any uniform trajectory works here; the loss only reads its states.
        const auto truth = solve_fixed(tableau_rk4(), g, problem.sample_ic(seed), Span{0.0, 1.0}, 5);
        ds.append(build_residual_dataset(tableau_euler(), g, truth));
    }
    CHECK(ds.size() == 15);

    auto hs = Hypersolver::create(tableau_euler(), 2, {6}, nn::Activation::softplus, 4);
    nn::Gradients grads(hs.corrector().layout());
    const double loss = residual_loss_gradient(hs, ds, grads);
    CHECK(loss == doctest::Approx(residual_loss(hs, ds)).epsilon(1e-14));
    CHECK(max_residual_gap(hs, ds) >= loss);
    const Vector fd = central_differences(hs.corrector().params(), [&] { return residual_loss(hs, ds); });
    CHECK(relative_error(grads.values(), fd) < 1e-5);
}

TEST_CASE("trajectory loss gradient is exact when f does not depend on z") {
    // With constant dynamics psi and f(s, z) carry no state dependence, so the
    // detached gradient is the full gradient.
    VectorField f(2, [](double s, std::span<const double>) { return Vector{1.0, s}; },
                  [](double s, std::span<const double> z0) { return Vector{z0[0] + s, z0[1] + s * s / 2}; });
    const auto truth = exact_trajectory(f, Vector{0.2, -0.4}, Span{0.0, 1.0}, 6);
    auto hs = Hypersolver::create(tableau_euler(), 2, {5}, nn::Activation::tanh, 11);
    nn::Gradients grads(hs.corrector().layout());
    const double loss = trajectory_loss_gradient(hs, f, truth, grads);
    CHECK(loss == doctest::Approx(trajectory_loss(hs, f, truth)).epsilon(1e-14));
    const Vector fd = central_differences(hs.corrector().params(), [&] { return trajectory_loss(hs, f, truth); });
    CHECK(relative_error(grads.values(), fd) < 1e-5);
}

TEST_CASE("training is seeded, logged per iteration and reduces the loss") {
    auto problem = problems::problem_linear({{1.0}}, "linear1");
    TrainConfig cfg;
    cfg.iterations = 200;
    cfg.pool_batches = 4;
    cfg.batch_size = 4;
    auto init = Hypersolver::create(tableau_euler(), 1, {16}, nn::Activation::tanh, 2);
    const auto a = train(init, {problem.training_problem()}, cfg);
    const auto b = train(init, {problem.training_problem()}, cfg);
    CHECK(a.loss_history.size() == 200);
    CHECK(a.lr_history.front() == cfg.lr_max);
    CHECK(a.loss_history == b.loss_history);
    CHECK(std::equal(a.solver.corrector().params().begin(), a.solver.corrector().params().end(),
                     b.solver.corrector().params().begin()));
    CHECK(a.loss_history.back() < 0.1 * a.loss_history.front());
    CHECK(a.delta > 0.0);
}

TEST_CASE("zero iterations returns the initialization") {
    auto problem = problems::problem_linear({{1.0}}, "linear1");
    TrainConfig cfg;
    cfg.iterations = 0;
    cfg.pretrain_iters = 0;
    cfg.pool_batches = 1;
    auto init = Hypersolver::create(tableau_euler(), 1, {4}, nn::Activation::prelu, 2);
    const auto res = train(init, {problem.training_problem()}, cfg);
    CHECK(res.loss_history.empty());
    CHECK(std::equal(res.solver.corrector().params().begin(), res.solver.corrector().params().end(),
                     init.corrector().params().begin()));
}

TEST_CASE("training config validation and divergence") {
    TrainConfig cfg;
    cfg.pretrain_iters = cfg.iterations + 1;
    CHECK_THROWS_AS(validate(cfg), RangeError);
    cfg = TrainConfig{};
    cfg.steps = {};
    CHECK_THROWS_AS(validate(cfg), RangeError);
    CHECK_THROWS_AS(parse_loss_kind("l2"), RangeError);
    CHECK(parse_loss_kind("combined") == LossKind::combined);

    auto problem = problems::problem_linear({{1.0}}, "linear1");
    cfg = TrainConfig{};
    cfg.iterations = 50;
    cfg.pool_batches = 1;
    cfg.batch_size = 2;
    cfg.lr_max = 1e300;
    cfg.lr_min = 1e300;
    auto init = Hypersolver::create(tableau_euler(), 1, {4}, nn::Activation::tanh, 2);
    CHECK_THROWS_AS(train(init, {problem.training_problem()}, cfg), TrainingFailure);
}

TEST_CASE("bundle round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "hyperode_bundle_test";
    std::filesystem::remove_all(dir);
    TrainConfig cfg;
    cfg.steps = {5, 10};
    cfg.loss = LossKind::combined;
    cfg.lambda = 0.25;
    const Bundle b{Hypersolver::create(tableau_alpha(0.5), 2, {8}, nn::Activation::prelu, 9, true), "vdp1", cfg,
                   0.125};
    save_bundle(b, dir);
    const Bundle back = load_bundle(dir);
    CHECK(back.problem == "vdp1");
    CHECK(back.delta == 0.125);
    CHECK(back.solver.base().name == "alpha:0.5");
    CHECK(back.solver.layout().include_s);
    CHECK(back.config.steps == cfg.steps);
    CHECK(back.config.loss == LossKind::combined);
    CHECK(back.config.lambda == 0.25);
    CHECK(std::equal(b.solver.corrector().params().begin(), b.solver.corrector().params().end(),
                     back.solver.corrector().params().begin()));
    const auto h = bundle_hash(dir);
    CHECK(h.size() == 16);
    CHECK(h == bundle_hash(dir));
    CHECK_THROWS_AS(load_bundle(dir / "nope"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("parameter sensitivity grows linearly in the step") {
    Rng rng(17);
    const auto problem = problems::problem_random_mlp(3, 16, 5);
    std::vector<Vector> probes, targets;
    for (int i = 0; i < 32; ++i) {
        probes.push_back(random_vector(rng, 3));
        targets.push_back(random_vector(rng, 3));
    }
    const auto grad = regression_gradient(*problem.network, probes, targets);
    const Vector etas{1e-6, 1e-5, 1e-4, 1e-3};
    const auto rows = param_sensitivity(*problem.network, probes, grad, etas);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double slope = std::log(rows[i].measured / rows[i - 1].measured) / std::log(etas[i] / etas[i - 1]);
        CHECK(slope == doctest::Approx(1.0).epsilon(0.05));
        CHECK(rows[i].step_norm == doctest::Approx(etas[i] * grad.norm()));
    }
}

TEST_CASE("regression gradient matches central differences") {
    Rng rng(3);
    nn::Mlp net = hyperode::testing::random_net(rng, nn::Activation::tanh);
    std::vector<Vector> xs, ys;
    for (int i = 0; i < 4; ++i) {
        xs.push_back(random_vector(rng, net.input_dim()));
        ys.push_back(random_vector(rng, net.output_dim()));
    }
    const auto g = regression_gradient(net, xs, ys);
    const Vector fd = central_differences(net.params(), [&] {
        double acc = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const Vector out = net.forward(xs[i]);
            for (std::size_t j = 0; j < out.size(); ++j) acc += 0.5 * (out[j] - ys[i][j]) * (out[j] - ys[i][j]);
        }
        return acc / static_cast<double>(xs.size());
    });
    CHECK(relative_error(g.values(), fd) < 1e-5);
}
