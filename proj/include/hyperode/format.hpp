#pragma once

#include <charconv>
#include <string>

namespace hyperode {

// Shortest text that round-trips the double exactly.
inline std::string format_double(double x) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

} // namespace hyperode
