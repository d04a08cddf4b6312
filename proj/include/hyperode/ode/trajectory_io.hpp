#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "hyperode/ode/trajectory.hpp"

namespace hyperode {

// Header `s,z0,...,z{n-1}`, one row per mesh point.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

struct TrajectoryManifest {
    std::string problem;
    std::string solver;
    std::size_t steps = 0;
    Span span;
    std::uint64_t seed = 0;
    std::size_t nfe = 0;
};

// {"problem", "solver", "K", "span": [s0, s1], "seed", "nfe"}
void write_manifest(const TrajectoryManifest& manifest, const std::filesystem::path& path);
TrajectoryManifest read_manifest(const std::filesystem::path& path);

} // namespace hyperode
