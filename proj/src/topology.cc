#include "llnroute/topology.h"

#include "llnroute/rng.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace llnroute
{

namespace
{

class DisjointSets
{
  public:
    explicit DisjointSets(std::size_t n)
        : m_parent(n)
    {
        std::iota(m_parent.begin(), m_parent.end(), std::size_t{0});
    }

    std::size_t Find(std::size_t x)
    {
        while (m_parent[x] != x)
        {
            m_parent[x] = m_parent[m_parent[x]];
            x = m_parent[x];
        }
        return x;
    }

    void Unite(std::size_t a, std::size_t b)
    {
        m_parent[Find(a)] = Find(b);
    }

  private:
    std::vector<std::size_t> m_parent;
};

bool
NearAny(Position p, const std::vector<Position>& placed, double rangeM)
{
    for (const auto& q : placed)
    {
        if (Distance(p, q) <= rangeM)
        {
            return true;
        }
    }
    return false;
}

[[noreturn]] void
Unsatisfiable(const std::string& what)
{
    throw TopologyError("CONNECTIVITY_UNSATISFIABLE: " + what);
}

/// Appends `count` nodes, each resampled until it touches the placed set.
bool
PlaceConnected(std::vector<Position>& placed,
               std::size_t count,
               const TopologyRequest& req,
               RngStream& rng)
{
    for (std::size_t i = 0; i < count; ++i)
    {
        bool ok = false;
        for (unsigned attempt = 0; attempt < kMaxPlacementAttempts && !ok; ++attempt)
        {
            Position p{rng.Uniform(0.0, req.field.widthM), rng.Uniform(0.0, req.field.heightM)};
            if (NearAny(p, placed, req.rangeM))
            {
                placed.push_back(p);
                ok = true;
            }
        }
        if (!ok)
        {
            return false;
        }
    }
    return true;
}

} // namespace

bool
IsConnected(std::span<const Position> positions, double rangeM)
{
    if (positions.empty())
    {
        return true;
    }
    DisjointSets sets(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
    {
        for (std::size_t j = i + 1; j < positions.size(); ++j)
        {
            if (Distance(positions[i], positions[j]) <= rangeM)
            {
                sets.Unite(i, j);
            }
        }
    }
    const auto root = sets.Find(0);
    for (std::size_t i = 1; i < positions.size(); ++i)
    {
        if (sets.Find(i) != root)
        {
            return false;
        }
    }
    return true;
}

std::vector<Position>
GenerateTopology(const TopologyRequest& req)
{
    if (req.nodes < 2)
    {
        throw std::invalid_argument("topology needs at least 2 nodes");
    }
    const Position sink{req.field.widthM / 2.0, req.field.heightM / 2.0};
    const uint64_t salt =
        req.nodes ^ (req.distToSink ? static_cast<uint64_t>(std::llround(*req.distToSink * 1000.0)) << 20
                                    : uint64_t{0});
    RngStream rng(req.seed, RngPurpose::Topology, salt);

    if (!req.distToSink)
    {
        std::vector<Position> placed{sink};
        if (!PlaceConnected(placed, req.nodes - 1, req, rng))
        {
            Unsatisfiable("no position within range after " + std::to_string(kMaxPlacementAttempts) +
                          " attempts");
        }
        return placed;
    }

    const double dist = *req.distToSink;
    if (dist < 0.0)
    {
        throw std::invalid_argument("distance to sink must be non-negative");
    }
    for (unsigned attempt = 0; attempt < kMaxPlacementAttempts; ++attempt)
    {
        std::vector<Position> placed{sink};
        Position probe{};
        bool inField = false;
        for (unsigned a = 0; a < kMaxPlacementAttempts && !inField; ++a)
        {
            const double theta = rng.Uniform(0.0, 2.0 * std::numbers::pi);
            probe = Position{sink.x + dist * std::cos(theta), sink.y + dist * std::sin(theta)};
            inField = probe.x >= 0.0 && probe.x <= req.field.widthM && probe.y >= 0.0 &&
                      probe.y <= req.field.heightM;
        }
        if (!inField)
        {
            Unsatisfiable("probe distance does not fit in the field");
        }
        placed.push_back(probe);
        if (PlaceConnected(placed, req.nodes - 2, req, rng) && IsConnected(placed, req.rangeM))
        {
            return placed;
        }
    }
    Unsatisfiable("probe at " + std::to_string(dist) + " m never joined the sink component");
}

} // namespace llnroute
