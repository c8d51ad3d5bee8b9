#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace llnroute
{

/// Simulated time, fixed-point microseconds since simulation start.
using SimTime = std::chrono::duration<int64_t, std::micro>;

inline SimTime
Seconds(double s)
{
    return SimTime{static_cast<int64_t>(std::llround(s * 1e6))};
}

inline SimTime
MilliSeconds(double ms)
{
    return SimTime{static_cast<int64_t>(std::llround(ms * 1e3))};
}

constexpr double
ToSeconds(SimTime t)
{
    return static_cast<double>(t.count()) / 1e6;
}

constexpr double
ToMilliSeconds(SimTime t)
{
    return static_cast<double>(t.count()) / 1e3;
}

} // namespace llnroute
