#pragma once

#include "llnroute/metrics.h"
#include "llnroute/radio.h"
#include "llnroute/rng.h"
#include "llnroute/router.h"
#include "llnroute/traffic.h"

#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

namespace llnroute
{

enum class Protocol : uint8_t
{
    Loadng,
    Aodv,
};

std::string_view ToString(Protocol p);
std::optional<Protocol> ParseProtocol(std::string_view name);

std::unique_ptr<RoutingProtocol> MakeRouter(Protocol p, Address self, const ProtocolTimers& timers);

struct NodeState
{
    Address id;
    Position position;
    Protocol protocol{Protocol::Loadng};
    std::unique_ptr<RoutingProtocol> router;
};

using Frame = std::variant<ControlMessage, DataPacket>;

enum class EventKind : uint8_t
{
    FrameDelivery,
    TimerFire,
    TrafficArrival,
    LinkFeedback,
};

std::string_view ToString(EventKind kind);

namespace event
{
struct FrameDelivery
{
    Address to;
    Address from;
    Frame frame;
};

struct TimerFire
{
    Address node;
};

struct TrafficArrival
{
    DataPacket pkt;
};

struct LinkFeedback
{
    Address node;
    Address neighbor;
    Frame frame;
    bool success{false};
};
} // namespace event

struct SimEvent
{
    SimTime at{0};
    uint64_t seqNo{0};
    std::variant<event::FrameDelivery, event::TimerFire, event::TrafficArrival, event::LinkFeedback> payload;

    EventKind Kind() const
    {
        return static_cast<EventKind>(payload.index());
    }
};

/// Pops in (at, seqNo) order; seqNo is assigned at insertion and strictly increases.
class EventQueue
{
  public:
    void Push(SimTime at, decltype(SimEvent::payload) payload);
    const SimEvent& Top() const
    {
        return m_heap.top();
    }
    SimEvent Pop();
    bool Empty() const
    {
        return m_heap.empty();
    }
    std::size_t Size() const
    {
        return m_heap.size();
    }

  private:
    struct Later
    {
        bool operator()(const SimEvent& a, const SimEvent& b) const
        {
            return a.at != b.at ? a.at > b.at : a.seqNo > b.seqNo;
        }
    };

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> m_heap;
    uint64_t m_nextSeq{0};
};

class SimulationError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct EngineConfig
{
    Protocol protocol{Protocol::Loadng};
    RadioModel radio;
    MacModel mac;
    ProtocolTimers timers;
    unsigned addressWidth{kDefaultAddressWidth};
    TrafficProfile traffic;
    /// Data figures restricted to this node's flows (distance sweeps).
    std::optional<Address> probe;
};

struct MacStats
{
    uint64_t broadcastFrames{0};
    uint64_t unicastFrames{0};
    uint64_t unicastAttempts{0};
    uint64_t unicastAttemptSuccesses{0};
    uint64_t unicastFailures{0};
    uint64_t receptions{0};
};

/**
 * Single-threaded deterministic event loop. Node i of the position list gets
 * address i + 1; node 0 is the sink.
 */
class Engine
{
  public:
    Engine(EngineConfig config, std::span<const Position> positions, uint64_t seed);

    Address Sink() const
    {
        return Address{1};
    }
    std::vector<Address> Clients() const;

    /// Queues arrivals, assigning packet ids in order.
    void ScheduleTraffic(std::span<const TrafficArrival> arrivals);
    /// Queues one arrival and returns its packet id.
    uint64_t ScheduleArrival(const TrafficArrival& arrival);

    /// Radio send from `from`: broadcast when `to` is empty.
    void Transmit(Address from, const Frame& frame, std::optional<Address> to);

    /// Processes every event with time <= until, then reports.
    MetricsReport Run(SimTime until);

    SimTime Now() const
    {
        return m_now;
    }
    const std::vector<NodeState>& Nodes() const
    {
        return m_nodes;
    }
    RoutingProtocol& RouterOf(Address a);
    const RoutingProtocol& RouterOf(Address a) const;
    const MacStats& Mac() const
    {
        return m_mac;
    }
    const MetricsCollector& Metrics() const
    {
        return m_metrics;
    }
    uint64_t RrepNonDestination() const
    {
        return m_rrepNonDestination;
    }
    /// (time, node) of every route request transmitted, for trace checks.
    const std::vector<std::pair<SimTime, Address>>& RreqLog() const
    {
        return m_rreqLog;
    }
    /// Per node: (frames put on air, frames that reached at least one receiver).
    const std::vector<std::pair<uint64_t, uint64_t>>& FramesByNode() const
    {
        return m_framesByNode;
    }
    /// Reception count per (sender, receiver) beyond radio range; must stay 0.
    uint64_t OutOfRangeDeliveries() const
    {
        return m_outOfRange;
    }

    /// Event trace: `time_us node kind detail`, one line per processed event.
    void SetTrace(std::ostream* os)
    {
        m_trace = os;
    }

  private:
    NodeState& NodeOf(Address a);
    void Dispatch(SimEvent ev);
    void Apply(Address node, RouterActions actions);
    void AuditReply(Address sender, const ControlMessage& msg);
    void CountTransmission(std::size_t fromIdx, const Frame& frame);
    void CountDelivered(std::size_t fromIdx);
    SimTime HopDelay();
    void Trace(const SimEvent& ev);

    EngineConfig m_config;
    std::vector<NodeState> m_nodes;
    std::vector<std::vector<std::pair<std::size_t, double>>> m_neighbors; ///< (index, distance)
    EventQueue m_queue;
    RngStream m_macRng;
    MetricsCollector m_metrics;
    MacStats m_mac;
    SimTime m_now{0};
    uint64_t m_nextPacketId{1};
    uint64_t m_framesTx{0};
    uint64_t m_framesRx{0};
    std::vector<std::pair<uint64_t, uint64_t>> m_framesByNode;
    uint64_t m_rrepNonDestination{0};
    uint64_t m_outOfRange{0};
    std::vector<std::set<std::pair<uint64_t, uint16_t>>> m_repliesSeen;
    std::vector<std::pair<SimTime, Address>> m_rreqLog;
    std::ostream* m_trace{nullptr};
};

} // namespace llnroute
