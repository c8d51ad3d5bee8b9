#include "llnroute/rng.h"

#include <cmath>
#include <stdexcept>

namespace llnroute
{

RngStream::RngStream(uint64_t masterSeed, RngPurpose purpose, uint64_t salt)
{
    std::seed_seq seq{static_cast<uint32_t>(masterSeed),
                      static_cast<uint32_t>(masterSeed >> 32),
                      static_cast<uint32_t>(purpose),
                      static_cast<uint32_t>(salt),
                      static_cast<uint32_t>(salt >> 32)};
    m_engine.seed(seq);
}

double
RngStream::Uniform01()
{
    return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
}

double
RngStream::Uniform(double lo, double hi)
{
    return lo + (hi - lo) * Uniform01();
}

SimTime
RngStream::UniformTime(SimTime lo, SimTime hi)
{
    if (hi <= lo)
    {
        return lo;
    }
    const auto span = static_cast<uint64_t>((hi - lo).count()) + 1;
    return lo + SimTime{static_cast<int64_t>(Below(span))};
}

double
RngStream::Exponential(double mean)
{
    return -mean * std::log1p(-Uniform01());
}

uint64_t
RngStream::Below(uint64_t n)
{
    if (n == 0)
    {
        throw std::invalid_argument("RngStream::Below requires n > 0");
    }
    // Rejection sampling avoids modulo bias.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do
    {
        x = m_engine();
    } while (x >= limit);
    return x % n;
}

bool
RngStream::Bernoulli(double p)
{
    if (p <= 0.0)
    {
        return false;
    }
    if (p >= 1.0)
    {
        return true;
    }
    return Uniform01() < p;
}

} // namespace llnroute
