#pragma once

#include <cstddef>
#include <vector>

#include "hyperode/hyper/hypersolver.hpp"
#include "hyperode/nn/mlp.hpp"

namespace hyperode {

struct ResidualRecord {
    double s = 0.0;
    double eps = 0.0;
    Vector z;         // true state z(s_k)
    Vector fz;        // f(s_k, z(s_k))
    Vector residual;  // R_k
};

// One record per step of a ground-truth trajectory.
struct ResidualDataset {
    std::vector<ResidualRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
    void append(const ResidualDataset& other);
};

ResidualDataset build_residual_dataset(const ButcherTableau& base, VectorField& f, const Trajectory& truth);

// (1/N) sum_k ||R_k - g_k||_2
double residual_loss(const Hypersolver& hs, const ResidualDataset& ds);

// Same loss; adds its gradient w.r.t. the corrector parameters into `grads`.
double residual_loss_gradient(const Hypersolver& hs, const ResidualDataset& ds, nn::Gradients& grads);

// max_k ||R_k - g_k||_2
double max_residual_gap(const Hypersolver& hs, const ResidualDataset& ds);

// sum_{k=1..K} ||z(s_k) - z_k||_2 with z_k from hyper_solve on the truth mesh.
double trajectory_loss(const Hypersolver& hs, VectorField& f, const Trajectory& truth);

// Same loss; adds its gradient into `grads`. The gradient flows through the
// unrolled correction terms only: psi and f(s, z) are held constant.
double trajectory_loss_gradient(const Hypersolver& hs, VectorField& f, const Trajectory& truth, nn::Gradients& grads);

} // namespace hyperode
