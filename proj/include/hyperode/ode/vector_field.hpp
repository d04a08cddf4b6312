#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "hyperode/types.hpp"

namespace hyperode {

// Dynamics f(s, z) with a private evaluation counter and an optional exact flow.
//
// The counter is per instance: concurrent solves must use separate instances
// (see clone()).
class VectorField {
public:
    using Dynamics = std::function<Vector(double s, std::span<const double> z)>;
    // State at time s of the trajectory that starts from z0 at time 0.
    using ExactSolution = std::function<Vector(double s, std::span<const double> z0)>;

    VectorField(std::size_t dim, Dynamics dynamics, ExactSolution exact = {});

    // Evaluates f(s, z); every call counts as one NFE.
    Vector operator()(double s, std::span<const double> z);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t nfe() const noexcept { return nfe_; }
    void reset_nfe() noexcept { nfe_ = 0; }

    bool has_exact() const noexcept { return static_cast<bool>(exact_); }
    Vector exact(double s, std::span<const double> z0) const;

    // Same dynamics with a fresh counter.
    VectorField clone() const;

private:
    std::size_t dim_;
    Dynamics dynamics_;
    ExactSolution exact_;
    std::size_t nfe_ = 0;
};

} // namespace hyperode
