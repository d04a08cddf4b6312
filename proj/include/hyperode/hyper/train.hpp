#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "hyperode/hyper/hypersolver.hpp"

namespace hyperode {

enum class LossKind { residual, trajectory, combined };

std::string_view to_string(LossKind kind) noexcept;
LossKind parse_loss_kind(std::string_view name);

struct TrainConfig {
    std::size_t iterations = 3000;
    double lr_max = 1e-2;
    double lr_min = 5e-4;
    double weight_decay = 1e-6;
    std::size_t batch_swap_every = 10;
    std::size_t pretrain_iters = 10;
    LossKind loss = LossKind::residual;
    // Weight of the trajectory term in the combined loss.
    double lambda = 0.0;
    std::uint64_t seed = 0;

    // Training data: pool_batches batches of batch_size ground-truth
    // trajectories, each on a mesh of `steps` (cycled) over `span`.
    std::size_t batch_size = 16;
    std::size_t pool_batches = 32;
    std::vector<std::size_t> steps{10};
    Span span{0.0, 1.0};
    double truth_tol = 1e-7;
};

// Throws RangeError for inconsistent settings.
void validate(const TrainConfig& cfg);

using InitialConditionSampler = std::function<Vector(std::uint64_t seed)>;

struct TrainingProblem {
    VectorField field;
    InitialConditionSampler sample_ic;
};

struct TrainResult {
    Hypersolver solver;
    std::vector<double> loss_history;  // one entry per iteration
    std::vector<double> lr_history;
    // Worst residual gap max_k ||R_k - g_k|| over the whole training pool.
    double delta = 0.0;
};

// Two-phase training: pretrain_iters on the first batch, then a new batch
// (drawn from the pool) every batch_swap_every iterations. AdamW with a cosine
// learning-rate schedule. Throws TrainingFailure on a non-finite loss.
TrainResult train(Hypersolver hs, const std::vector<TrainingProblem>& problems, const TrainConfig& cfg);

} // namespace hyperode
