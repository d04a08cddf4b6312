#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>

#include "hyperode/hyper/hypersolver.hpp"
#include "hyperode/ode/tableau.hpp"

namespace hyperode::bench {

// Fixed-step method under benchmark: a plain RK tableau or a hypersolver.
class Method {
public:
    static Method plain(ButcherTableau tab);
    static Method hyper(Hypersolver hs, std::string name = {});

    const std::string& name() const noexcept { return name_; }
    bool corrected() const noexcept { return std::holds_alternative<Hypersolver>(impl_); }
    const ButcherTableau& base() const;
    std::size_t order() const { return base().order; }
    // Dynamics evaluations per step.
    std::size_t stages() const { return base().stages(); }
    // Corrector MACs per step; 0 for plain methods.
    std::size_t mac_g() const;
    const Hypersolver* hypersolver() const noexcept { return std::get_if<Hypersolver>(&impl_); }

    struct Solve {
        Trajectory trajectory;
        std::size_t corrector_evals = 0;
    };
    Solve solve(VectorField& f, std::span<const double> z0, Span span, std::size_t steps) const;

private:
    Method(std::string name, std::variant<ButcherTableau, Hypersolver> impl)
        : name_(std::move(name)), impl_(std::move(impl)) {}

    std::string name_;
    std::variant<ButcherTableau, Hypersolver> impl_;
};

} // namespace hyperode::bench
