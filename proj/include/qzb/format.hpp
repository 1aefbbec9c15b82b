#pragma once

#include <charconv>
#include <string>

namespace qzb {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double value)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return {buf, end};
}

} // namespace qzb
