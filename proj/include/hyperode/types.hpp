#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace hyperode {

using Vector = std::vector<double>;

// Integration interval [begin, end].
struct Span {
    double begin = 0.0;
    double end = 1.0;

    double length() const noexcept { return end - begin; }
};

inline double norm2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// out += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += alpha * x[i];
}

inline Vector difference(std::span<const double> a, std::span<const double> b) {
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

} // namespace hyperode
