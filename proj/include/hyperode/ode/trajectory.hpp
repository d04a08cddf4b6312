#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hyperode/ode/vector_field.hpp"
#include "hyperode/types.hpp"

namespace hyperode {

// States on a uniform mesh s_0 < ... < s_K. Row 0 is the initial condition.
struct Trajectory {
    Vector s;
    std::vector<Vector> z;

    std::size_t steps() const noexcept { return s.empty() ? 0 : s.size() - 1; }
    std::size_t dim() const noexcept { return z.empty() ? 0 : z.front().size(); }
    double step_size() const { return (s.back() - s.front()) / static_cast<double>(steps()); }
    const Vector& terminal() const { return z.back(); }

    // Throws MeshError unless the mesh has >= 2 points, consistent rows and
    // spacing uniform to 1e-12 relative.
    void require_uniform() const;
};

// s_k = begin + k (end - begin) / K, k = 0..K.
Vector uniform_mesh(Span span, std::size_t steps);

// Mesh states from the field's exact solution (autonomous flow from span.begin).
Trajectory exact_trajectory(const VectorField& field, std::span<const double> z0, Span span, std::size_t steps);

} // namespace hyperode
