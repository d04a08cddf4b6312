#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hyperode/nn/mlp.hpp"
#include "hyperode/ode/runge_kutta.hpp"
#include "hyperode/ode/tableau.hpp"
#include "hyperode/ode/trajectory.hpp"
#include "hyperode/ode/vector_field.hpp"

namespace hyperode {

// Corrector input: concatenation [z (n), f(s, z) (n), eps (1), s (1, optional)].
struct InputLayout {
    std::size_t state_dim = 0;
    bool include_s = false;

    std::size_t width() const noexcept { return 2 * state_dim + 1 + (include_s ? 1 : 0); }
    Vector assemble(std::span<const double> z, std::span<const double> fz, double eps, double s) const;
};

// Inputs available to a correction term at one step.
struct CorrectionQuery {
    double s = 0.0;
    double eps = 0.0;
    std::span<const double> z;
    std::span<const double> fz;
};

// Anything that produces the eps^(p+1)-scaled correction g for one step.
using CorrectionFn = std::function<Vector(const CorrectionQuery&)>;

struct HyperStep {
    Vector z_next;
    Vector psi;
    Vector fz;
    Vector correction;
};

// z + eps psi(s, z) + eps^(p+1) g. f(s, z) is the first RK stage, so the step
// costs exactly base.stages() dynamics evaluations and one correction.
HyperStep hyper_step(const ButcherTableau& base, VectorField& f, double s, std::span<const double> z, double eps,
                     const CorrectionFn& correction);

// Base tableau plus corrector network. The correction exponent is always
// base.order + 1.
class Hypersolver {
public:
    Hypersolver(ButcherTableau base, nn::Mlp corrector, InputLayout layout);

    // Corrector dims: [layout width, hidden..., state_dim].
    static Hypersolver create(ButcherTableau base, std::size_t state_dim, const std::vector<std::size_t>& hidden,
                              nn::Activation act, std::uint64_t seed, bool include_s = false);

    const ButcherTableau& base() const noexcept { return base_; }
    std::size_t order() const noexcept { return base_.order; }
    std::size_t state_dim() const noexcept { return layout_.state_dim; }
    const InputLayout& layout() const noexcept { return layout_; }
    const nn::Mlp& corrector() const noexcept { return corrector_; }
    nn::Mlp& corrector() noexcept { return corrector_; }

    // Same corrector on a different base method (order must match).
    Hypersolver with_base(ButcherTableau base) const;

    // g(z, f(s,z), eps[, s]); does not touch the evaluation counter.
    Vector correction(double s, double eps, std::span<const double> z, std::span<const double> fz) const;

    // One hypersolved step; counts one corrector evaluation.
    Vector step(VectorField& f, double s, std::span<const double> z, double eps);

    std::size_t corrector_evals() const noexcept { return corrector_evals_; }
    void reset_corrector_evals() noexcept { corrector_evals_ = 0; }

private:
    ButcherTableau base_;
    nn::Mlp corrector_;
    InputLayout layout_;
    std::size_t corrector_evals_ = 0;
};

inline Vector hyper_step(Hypersolver& hs, VectorField& f, double s, std::span<const double> z, double eps) {
    return hs.step(f, s, z, eps);
}

// K hypersolved steps on the uniform mesh over `span`.
Trajectory hyper_solve(Hypersolver& hs, VectorField& f, std::span<const double> z0, Span span, std::size_t steps);

// R_k = [z(s_{k+1}) - z(s_k) - eps psi(s_k, z(s_k))] / eps^(p+1), psi taken from the true state.
std::vector<Vector> base_residuals(const ButcherTableau& base, VectorField& f, const Trajectory& truth);

} // namespace hyperode
