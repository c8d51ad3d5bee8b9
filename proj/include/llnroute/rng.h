#pragma once

#include "llnroute/sim-time.h"

#include <cstdint>
#include <random>

namespace llnroute
{

/// Independent random streams per run are keyed by (master seed, purpose, salt).
enum class RngPurpose : uint64_t
{
    Topology = 1,
    Mac = 2,
    MeterTraffic = 3,
    ConfigTraffic = 4,
};

/**
 * mt19937_64 with hand-rolled variate generation, so a given seed produces
 * the same sequence on every standard library.
 */
class RngStream
{
  public:
    RngStream(uint64_t masterSeed, RngPurpose purpose, uint64_t salt = 0);

    uint64_t NextU64()
    {
        return m_engine();
    }

    /// Uniform on [0, 1).
    double Uniform01();
    /// Uniform on [lo, hi).
    double Uniform(double lo, double hi);
    /// Uniform on [lo, hi] with microsecond granularity.
    SimTime UniformTime(SimTime lo, SimTime hi);
    double Exponential(double mean);
    /// Uniform integer on [0, n); n must be positive.
    uint64_t Below(uint64_t n);
    bool Bernoulli(double p);

  private:
    std::mt19937_64 m_engine;
};

} // namespace llnroute
