#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperode/types.hpp"

namespace hyperode {

// Coefficients (a, b, c) of an explicit Runge-Kutta method.
struct ButcherTableau {
    std::string name;
    std::size_t order = 0;
    std::vector<Vector> a;  // stages x stages, strictly lower triangular
    Vector b;
    Vector c;
    // Parameter of the second-order alpha family, when the tableau came from it.
    std::optional<double> alpha;

    std::size_t stages() const noexcept { return b.size(); }
};

// Throws RangeError unless the tableau is explicit and consistent:
// strictly lower triangular a, sum(b) = 1, c_i = sum_j a_ij, c_1 = 0.
void validate(const ButcherTableau& tab);

ButcherTableau tableau_euler();
ButcherTableau tableau_midpoint();
ButcherTableau tableau_heun();
ButcherTableau tableau_rk4();

// Second-order family: c = [0, alpha], a_21 = alpha, b = [1 - 1/(2 alpha), 1/(2 alpha)].
// alpha = 0.5 is the midpoint method, alpha = 1 is Heun.
ButcherTableau tableau_alpha(double alpha);

// "euler", "midpoint", "heun", "rk4" or "alpha:<value>".
ButcherTableau tableau_by_name(std::string_view name);

} // namespace hyperode
