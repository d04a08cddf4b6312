#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hyperode {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Child seed for a named stream (e.g. "init", "ic", "batch") of a root seed.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) noexcept {
    return splitmix64(root ^ splitmix64(fnv1a64(stream)));
}

} // namespace hyperode
