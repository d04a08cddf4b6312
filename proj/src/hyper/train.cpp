#include "hyperode/hyper/train.hpp"

#include <cmath>
#include <random>
#include <string>

#include "hyperode/error.hpp"
#include "hyperode/hyper/losses.hpp"
#include "hyperode/nn/optimizer.hpp"
#include "hyperode/ode/dopri5.hpp"
#include "hyperode/random.hpp"

namespace hyperode {

namespace {

struct Sample {
    std::size_t problem = 0;
    Trajectory truth;
    ResidualDataset residuals;
};

using Batch = std::vector<Sample>;

std::vector<Batch> build_pool(const ButcherTableau& base, const std::vector<TrainingProblem>& problems,
                              const TrainConfig& cfg) {
    const std::uint64_t ic_root = derive_seed(cfg.seed, "ic");
    std::vector<Batch> pool(cfg.pool_batches);
    std::size_t index = 0;
    for (auto& batch : pool) {
        batch.reserve(cfg.batch_size);
        for (std::size_t i = 0; i < cfg.batch_size; ++i, ++index) {
            Sample sample;
            sample.problem = index % problems.size();
            const auto& problem = problems[sample.problem];
            const Vector z0 = problem.sample_ic(splitmix64(ic_root + index));
            VectorField field = problem.field.clone();
            const std::size_t steps = cfg.steps[index % cfg.steps.size()];
            sample.truth = solve_reference(field, z0, cfg.span, steps, cfg.truth_tol);
            sample.residuals = build_residual_dataset(base, field, sample.truth);
            batch.push_back(std::move(sample));
        }
    }
    return pool;
}

double batch_loss_gradient(const Hypersolver& hs, const std::vector<TrainingProblem>& problems, const Batch& batch,
                           const TrainConfig& cfg, nn::Gradients& grads) {
    const double weight = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    nn::Gradients local(hs.corrector().layout());
    for (const auto& sample : batch) {
        local.zero();
        double value = 0.0;
        if (cfg.loss != LossKind::trajectory) value += residual_loss_gradient(hs, sample.residuals, local);
        if (cfg.loss != LossKind::residual) {
            const double lambda = cfg.loss == LossKind::combined ? cfg.lambda : 1.0;
            if (lambda != 0.0) {
                VectorField field = problems[sample.problem].field.clone();
                nn::Gradients traj_grads(hs.corrector().layout());
                value += lambda * trajectory_loss_gradient(hs, field, sample.truth, traj_grads);
                traj_grads *= lambda;
                local += traj_grads;
            }
        }
        local *= weight;
        grads += local;
        loss += weight * value;
    }
    return loss;
}

} // namespace

std::string_view to_string(LossKind kind) noexcept {
    switch (kind) {
    case LossKind::residual: return "residual";
    case LossKind::trajectory: return "trajectory";
    case LossKind::combined: return "combined";
    }
    return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
    if (name == "residual") return LossKind::residual;
    if (name == "trajectory") return LossKind::trajectory;
    if (name == "combined") return LossKind::combined;
    throw RangeError("unknown loss '" + std::string(name) + "'");
}

void validate(const TrainConfig& cfg) {
    if (cfg.batch_swap_every == 0) throw RangeError("batch_swap_every must be >= 1");
    if (cfg.iterations > 0 && cfg.pretrain_iters > cfg.iterations)
        throw RangeError("pretrain_iters must not exceed iterations");
    if (cfg.batch_size == 0 || cfg.pool_batches == 0) throw RangeError("training pool must be nonempty");
    if (cfg.steps.empty()) throw RangeError("training needs at least one mesh size");
    for (std::size_t k : cfg.steps)
        if (k == 0) throw RangeError("training mesh sizes must be >= 1");
    if (!(cfg.span.length() > 0.0)) throw RangeError("training span must have positive length");
    if (!(cfg.truth_tol > 0.0)) throw RangeError("ground-truth tolerance must be positive");
    if (!(cfg.lr_max > 0.0) || cfg.lr_min < 0.0 || cfg.lr_min > cfg.lr_max)
        throw RangeError("learning rates must satisfy 0 <= lr_min <= lr_max, lr_max > 0");
}

TrainResult train(Hypersolver hs, const std::vector<TrainingProblem>& problems, const TrainConfig& cfg) {
    validate(cfg);
    if (problems.empty()) throw RangeError("training needs at least one problem");
    for (const auto& problem : problems)
        if (problem.field.dim() != hs.state_dim())
            throw DimensionError("training problem dimension does not match the hypersolver");

    const auto pool = build_pool(hs.base(), problems, cfg);

    TrainResult result{hs, {}, {}, 0.0};
    result.loss_history.reserve(cfg.iterations);
    result.lr_history.reserve(cfg.iterations);

    nn::OptimizerState opt;
    opt.kind = nn::OptimizerKind::adamw;
    opt.weight_decay = cfg.weight_decay;
    const nn::CosineSchedule schedule{cfg.lr_max, cfg.lr_min, std::max<std::size_t>(cfg.iterations, 1)};

    Rng batch_rng(derive_seed(cfg.seed, "batch"));
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::size_t current = 0;

    nn::Gradients grads(hs.corrector().layout());
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        if (it >= cfg.pretrain_iters && (it - cfg.pretrain_iters) % cfg.batch_swap_every == 0)
            current = pick(batch_rng);

        grads.zero();
        const double loss = batch_loss_gradient(result.solver, problems, pool[current], cfg, grads);
        if (!std::isfinite(loss)) throw TrainingFailure("non-finite training loss", it);

        opt.lr = nn::cosine_lr(schedule, it);
        try {
            nn::optimizer_step(opt, result.solver.corrector(), grads);
        } catch (const NumericError&) {
            throw TrainingFailure("non-finite gradient", it);
        }
        result.loss_history.push_back(loss);
        result.lr_history.push_back(opt.lr);
    }

    for (const auto& batch : pool)
        for (const auto& sample : batch)
            result.delta = std::max(result.delta, max_residual_gap(result.solver, sample.residuals));
    return result;
}

} // namespace hyperode
