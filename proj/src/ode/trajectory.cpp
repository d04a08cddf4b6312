#include "hyperode/ode/trajectory.hpp"

#include <cmath>
#include <string>

#include "hyperode/error.hpp"

namespace hyperode {

void Trajectory::require_uniform() const {
    if (s.size() < 2) throw MeshError("trajectory needs at least two mesh points");
    if (z.size() != s.size()) throw MeshError("trajectory has a different number of states and mesh points");
    for (const auto& row : z)
        if (row.size() != z.front().size()) throw MeshError("trajectory rows have different lengths");
    const double eps = step_size();
    if (!(eps > 0.0)) throw MeshError("trajectory mesh must be increasing");
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
        const double gap = s[k + 1] - s[k];
        if (std::abs(gap - eps) > 1e-12 * std::max(std::abs(eps), std::abs(s.back())))
            throw MeshError("trajectory mesh is not uniform at step " + std::to_string(k));
    }
}

Vector uniform_mesh(Span span, std::size_t steps) {
    if (steps == 0) throw RangeError("mesh needs at least one step");
    if (!(span.length() > 0.0)) throw RangeError("integration span must have positive length");
    Vector mesh(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k)
        mesh[k] = span.begin + span.length() * static_cast<double>(k) / static_cast<double>(steps);
    mesh.back() = span.end;
    return mesh;
}

Trajectory exact_trajectory(const VectorField& field, std::span<const double> z0, Span span, std::size_t steps) {
    Trajectory traj;
    traj.s = uniform_mesh(span, steps);
    traj.z.reserve(traj.s.size());
    traj.z.emplace_back(z0.begin(), z0.end());
    for (std::size_t k = 1; k < traj.s.size(); ++k) traj.z.push_back(field.exact(traj.s[k] - span.begin, z0));
    return traj;
}

} // namespace hyperode
