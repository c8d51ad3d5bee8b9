#pragma once

#include "llnroute/sim-time.h"
#include "llnroute/wire.h"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace llnroute
{

enum class TimerKind : uint8_t
{
    PendingAck,
    DiscoveryRetry,
};

enum class DropReason : uint8_t
{
    BufferFull,
    DiscoveryFailed,
    NoRoute,
    LinkFailure,
    HopLimit,
};

inline constexpr std::size_t kDropReasonCount = 5;

std::string_view ToString(DropReason reason);

namespace action
{
struct BroadcastControl
{
    ControlMessage msg;

    friend bool operator==(const BroadcastControl&, const BroadcastControl&) = default;
};

struct UnicastControl
{
    ControlMessage msg;
    Address to;

    friend bool operator==(const UnicastControl&, const UnicastControl&) = default;
};

struct UnicastData
{
    DataPacket pkt;
    Address to;

    friend bool operator==(const UnicastData&, const UnicastData&) = default;
};

/// Packet reached its destination at this router.
struct DeliverData
{
    DataPacket pkt;

    friend bool operator==(const DeliverData&, const DeliverData&) = default;
};

struct StartTimer
{
    TimerKind kind;
    SimTime at;

    friend bool operator==(const StartTimer&, const StartTimer&) = default;
};

struct DropData
{
    DataPacket pkt;
    DropReason reason;

    friend bool operator==(const DropData&, const DropData&) = default;
};
} // namespace action

/// One effect requested by a router. Routers never perform I/O themselves.
using RouterAction = std::variant<action::BroadcastControl,
                                  action::UnicastControl,
                                  action::UnicastData,
                                  action::DeliverData,
                                  action::StartTimer,
                                  action::DropData>;
using RouterActions = std::vector<RouterAction>;

/// Protocol timing and sizing constants, shared by both protocols.
struct ProtocolTimers
{
    SimTime routeHold{Seconds(100)};
    SimTime blacklistTime{Seconds(30)};
    SimTime rrepAckTimeout{Seconds(1)};
    unsigned rreqRetries{3};
    SimTime rreqBackoff{Seconds(2)}; ///< first retry delay; doubles per retry
    uint8_t hopLimit{32};
    std::size_t bufferCap{8};
    SimTime rreqDedupHold{Seconds(30)};

    friend bool operator==(const ProtocolTimers&, const ProtocolTimers&) = default;
};

/// Protocol-side counters that are not data-packet drops.
struct RouterCounters
{
    uint64_t rrepOrphaned{0};
    uint64_t rerrUnroutable{0};
    uint64_t rreqDuplicates{0};
    uint64_t rreqBlacklisted{0};
    uint64_t discoveriesStarted{0};
    uint64_t discoveriesFailed{0};

    RouterCounters& operator+=(const RouterCounters& o);
    friend bool operator==(const RouterCounters&, const RouterCounters&) = default;
};

/// Protocol-neutral view of one routing entry, for oracles and dumps.
struct RouteView
{
    Address destination;
    Address nextHop;
    unsigned metric{0};
    SequenceNumber seq;
    SimTime validUntil{0};
    bool valid{false};
    bool bidirectional{false};
};

/// Renders entries as `dest next_hop metric seq valid_until bidir` lines.
std::string FormatRouteDump(const std::vector<RouteView>& routes);

/**
 * Interface the simulation engine drives. Every entry point returns the
 * effects to apply; identical state and inputs give identical effects.
 */
class RoutingProtocol
{
  public:
    virtual ~RoutingProtocol() = default;

    virtual Address GetAddress() const = 0;
    virtual bool OwnsAddress(Address a) const = 0;

    /// A locally originated packet.
    virtual RouterActions SendData(const DataPacket& pkt, SimTime now) = 0;
    /// A data frame received from a neighbor.
    virtual RouterActions ReceiveData(const DataPacket& pkt, Address prevHop, SimTime now) = 0;
    virtual RouterActions ReceiveControl(const ControlMessage& msg, Address prevHop, SimTime now) = 0;
    /// MAC gave up delivering a data frame to nextHop.
    virtual RouterActions DataLinkFailed(Address nextHop, const DataPacket& pkt, SimTime now) = 0;
    /// MAC gave up delivering a control frame to nextHop.
    virtual RouterActions ControlLinkFailed(Address nextHop, const ControlMessage& msg, SimTime now) = 0;
    virtual RouterActions Tick(SimTime now) = 0;

    virtual std::optional<RouteView> LookupRoute(Address destination, SimTime now) const = 0;
    virtual std::vector<RouteView> RoutingSnapshot(SimTime now) const = 0;
    virtual const RouterCounters& Counters() const = 0;
};

/**
 * Flood suppression keyed by (originator, seq). A request is admitted the
 * first time, and again only when it arrives with a strictly lower metric.
 */
class RreqDedupCache
{
  public:
    explicit RreqDedupCache(SimTime hold)
        : m_hold(hold)
    {
    }

    /// Returns true and records the metric when the request should be processed.
    bool Admit(Address originator, SequenceNumber seq, unsigned metric, SimTime now);
    void Purge(SimTime now);
    std::size_t Size() const
    {
        return m_entries.size();
    }

  private:
    struct Entry
    {
        unsigned bestMetric;
        SimTime expiry;
    };

    SimTime m_hold;
    std::map<std::pair<uint64_t, uint16_t>, Entry> m_entries;
};

/// A route discovery in progress, with the packets waiting on it.
struct PendingDiscovery
{
    Address destination;
    std::deque<DataPacket> buffered;
    unsigned retriesLeft{0};
    unsigned attempt{0}; ///< 0 for the initial request
    SimTime nextRetryAt{0};
};

/**
 * Pending discoveries by destination, with a bounded per-destination packet
 * buffer. Overflow evicts the oldest packet.
 */
class DiscoveryTable
{
  public:
    explicit DiscoveryTable(const ProtocolTimers& timers)
        : m_timers(timers)
    {
    }

    bool IsPending(Address destination) const
    {
        return m_pending.contains(destination.value);
    }

    /// Starts a discovery buffering pkt. Returns the retry deadline.
    SimTime Start(const DataPacket& pkt, SimTime now);
    /// Appends to an existing discovery; returns the evicted packet, if any.
    std::optional<DataPacket> Buffer(const DataPacket& pkt);
    /// Removes the discovery and hands back its packets in FIFO order.
    std::deque<DataPacket> Take(Address destination);

    struct Due
    {
        Address destination;
        bool retry;           ///< false: retries exhausted, discovery abandoned
        SimTime nextDeadline; ///< valid when retry
        std::deque<DataPacket> dropped;
    };

    /// Advances every discovery whose deadline has passed.
    std::vector<Due> Advance(SimTime now);

    const PendingDiscovery* Find(Address destination) const;
    std::size_t Size() const
    {
        return m_pending.size();
    }

  private:
    SimTime BackoffFor(unsigned attempt) const;

    ProtocolTimers m_timers;
    std::map<uint64_t, PendingDiscovery> m_pending;
};

/**
 * Route replacement rule shared by both protocols: a fresher sequence number
 * wins; at equal sequence numbers a lower metric wins, or any metric when the
 * incumbent is no longer valid. An older sequence number never replaces.
 */
bool ShouldReplaceRoute(bool incumbentValid,
                        SequenceNumber incumbentSeq,
                        unsigned incumbentMetric,
                        SequenceNumber candidateSeq,
                        unsigned candidateMetric);

} // namespace llnroute
