#include "hyperode/bench/method.hpp"

namespace hyperode::bench {

Method Method::plain(ButcherTableau tab) {
    validate(tab);
    std::string name = tab.name;
    return Method(std::move(name), std::move(tab));
}

Method Method::hyper(Hypersolver hs, std::string name) {
    if (name.empty()) name = "hyper-" + hs.base().name;
    return Method(std::move(name), std::move(hs));
}

const ButcherTableau& Method::base() const {
    if (const auto* hs = std::get_if<Hypersolver>(&impl_)) return hs->base();
    return std::get<ButcherTableau>(impl_);
}

std::size_t Method::mac_g() const {
    if (const auto* hs = std::get_if<Hypersolver>(&impl_)) return hs->corrector().mac_count();
    return 0;
}

Method::Solve Method::solve(VectorField& f, std::span<const double> z0, Span span, std::size_t steps) const {
    if (const auto* hs = std::get_if<Hypersolver>(&impl_)) {
        Hypersolver local = *hs;
        local.reset_corrector_evals();
        Trajectory traj = hyper_solve(local, f, z0, span, steps);
        return Solve{std::move(traj), local.corrector_evals()};
    }
    return Solve{solve_fixed(std::get<ButcherTableau>(impl_), f, z0, span, steps), 0};
}

} // namespace hyperode::bench
