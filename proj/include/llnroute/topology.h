#pragma once

#include "llnroute/radio.h"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace llnroute
{

struct FieldSize
{
    double widthM{1000.0};
    double heightM{1000.0};

    friend bool operator==(const FieldSize&, const FieldSize&) = default;
};

class TopologyError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr unsigned kMaxPlacementAttempts = 1000;

struct TopologyRequest
{
    std::size_t nodes{2};
    FieldSize field;
    double rangeM{150.0};
    /// Distance sweep: index 1 is a probe at exactly this distance from the sink.
    std::optional<double> distToSink;
    uint64_t seed{1};
};

/**
 * Places the sink at the field center (index 0) and the remaining nodes at
 * uniform random positions. A candidate position is resampled until it lies
 * within radio range of a node already placed, which keeps the unit-disk
 * graph connected. Throws TopologyError (CONNECTIVITY_UNSATISFIABLE) after
 * kMaxPlacementAttempts failures.
 */
std::vector<Position> GenerateTopology(const TopologyRequest& request);

/// Union-find connectivity of the unit-disk graph.
bool IsConnected(std::span<const Position> positions, double rangeM);

} // namespace llnroute
