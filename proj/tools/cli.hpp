#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hyperode::cli {

// Stable exit codes for scripting.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kIo = 3,
    kNumeric = 4,
};

// Runs one command line (without the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "0..4" (inclusive) or "0,3,7".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

// Seed of the k-th held-out initial condition under a root seed. Disjoint
// from the stream training draws from.
std::uint64_t eval_seed(std::uint64_t root, std::uint64_t k);

} // namespace hyperode::cli
