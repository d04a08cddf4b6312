#include "hyperode/ode/tableau.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "hyperode/error.hpp"

namespace hyperode {

namespace {

constexpr double kConsistencyTol = 1e-14;

ButcherTableau make(std::string name, std::size_t order, std::vector<Vector> a, Vector b, Vector c) {
    ButcherTableau tab{std::move(name), order, std::move(a), std::move(b), std::move(c), std::nullopt};
    validate(tab);
    return tab;
}

} // namespace

void validate(const ButcherTableau& tab) {
    const std::size_t p = tab.stages();
    if (p == 0 || tab.order == 0) throw RangeError("tableau '" + tab.name + "' is empty");
    if (tab.c.size() != p || tab.a.size() != p)
        throw RangeError("tableau '" + tab.name + "' has inconsistent stage counts");
    for (std::size_t i = 0; i < p; ++i) {
        if (tab.a[i].size() != p) throw RangeError("tableau '" + tab.name + "' a is not square");
        for (std::size_t j = i; j < p; ++j)
            if (tab.a[i][j] != 0.0) throw RangeError("tableau '" + tab.name + "' is not explicit");
        const double row = std::accumulate(tab.a[i].begin(), tab.a[i].end(), 0.0);
        if (std::abs(row - tab.c[i]) > kConsistencyTol)
            throw RangeError("tableau '" + tab.name + "' row sum differs from c at stage " + std::to_string(i));
    }
    if (tab.c[0] != 0.0) throw RangeError("tableau '" + tab.name + "' must have c_1 = 0");
    const double bsum = std::accumulate(tab.b.begin(), tab.b.end(), 0.0);
    if (std::abs(bsum - 1.0) > kConsistencyTol) throw RangeError("tableau '" + tab.name + "' weights do not sum to 1");
}

ButcherTableau tableau_euler() { return make("euler", 1, {{0.0}}, {1.0}, {0.0}); }

ButcherTableau tableau_midpoint() {
    return make("midpoint", 2, {{0.0, 0.0}, {0.5, 0.0}}, {0.0, 1.0}, {0.0, 0.5});
}

ButcherTableau tableau_heun() {
    return make("heun", 2, {{0.0, 0.0}, {1.0, 0.0}}, {0.5, 0.5}, {0.0, 1.0});
}

ButcherTableau tableau_rk4() {
    return make("rk4", 4,
                {{0.0, 0.0, 0.0, 0.0}, {0.5, 0.0, 0.0, 0.0}, {0.0, 0.5, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0}},
                {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}, {0.0, 0.5, 0.5, 1.0});
}

ButcherTableau tableau_alpha(double alpha) {
    if (alpha == 0.0) throw SingularParameterError("alpha family is singular at alpha = 0");
    if (!std::isfinite(alpha)) throw RangeError("alpha must be finite");
    const double w2 = 1.0 / (2.0 * alpha);
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), alpha);
    auto tab = make("alpha:" + std::string(buf, end), 2, {{0.0, 0.0}, {alpha, 0.0}}, {1.0 - w2, w2}, {0.0, alpha});
    tab.alpha = alpha;
    return tab;
}

ButcherTableau tableau_by_name(std::string_view name) {
    if (name == "euler") return tableau_euler();
    if (name == "midpoint") return tableau_midpoint();
    if (name == "heun") return tableau_heun();
    if (name == "rk4") return tableau_rk4();
    if (name.starts_with("alpha:")) {
        const auto text = name.substr(6);
        double alpha = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), alpha);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw RangeError("cannot parse alpha in '" + std::string(name) + "'");
        return tableau_alpha(alpha);
    }
    throw RangeError("unknown tableau '" + std::string(name) + "'");
}

} // namespace hyperode
