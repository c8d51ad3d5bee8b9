#pragma once

#include "llnroute/sim-time.h"

namespace llnroute
{

struct Position
{
    double x{0};
    double y{0};

    friend bool operator==(const Position&, const Position&) = default;
};

double Distance(Position a, Position b);

/// Unit disk with distance-dependent loss.
struct RadioModel
{
    double rangeM{150.0};
    double alpha{2.0};
    double baseSuccess{1.0};
    /// When false the disk is lossless: baseSuccess everywhere within range.
    bool distanceLoss{true};

    friend bool operator==(const RadioModel&, const RadioModel&) = default;
};

/**
 * Per-frame reception probability at distance d:
 * baseSuccess * (1 - (d/R)^alpha) inside the disk, 0 beyond it.
 * Throws std::invalid_argument for negative d.
 */
double PRecv(double distanceM, const RadioModel& model);

/// Contention MAC abstraction: a delay per attempt and a bounded retry budget.
struct MacModel
{
    SimTime baseDelay{MilliSeconds(8)};
    SimTime jitter{MilliSeconds(8)};
    unsigned retries{3}; ///< attempts after the first
    SimTime backoff{MilliSeconds(20)};

    friend bool operator==(const MacModel&, const MacModel&) = default;
};

} // namespace llnroute
