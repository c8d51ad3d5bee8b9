#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace llnroute
{

/// Shortest decimal text that parses back to the same double.
inline std::string
FormatDouble(double v)
{
    if (std::isnan(v))
    {
        return "nan";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

inline std::optional<double>
ParseDouble(std::string_view s)
{
    if (s == "nan")
    {
        return std::nan("");
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
    {
        return std::nullopt;
    }
    return v;
}

inline std::optional<uint64_t>
ParseUnsigned(std::string_view s)
{
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    {
        return std::nullopt;
    }
    return v;
}

} // namespace llnroute
