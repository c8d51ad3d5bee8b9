#pragma once

#include "llnroute/router.h"

#include <map>
#include <set>
#include <vector>

namespace llnroute::loadng
{

struct RouteEntry
{
    Address destination;
    Address nextHop;
    unsigned metric{0};
    SequenceNumber seq;
    SimTime validUntil{0};
    bool bidirectionalConfirmed{false};
    bool valid{false};

    bool IsUsable(SimTime now) const
    {
        return valid && now <= validUntil;
    }
};

/// At most one entry per destination; no precursors.
class RoutingSet
{
  public:
    const RouteEntry* Find(Address destination) const;
    RouteEntry* Find(Address destination);
    /// Usable entry or nullptr.
    const RouteEntry* Lookup(Address destination, SimTime now) const;

    /// Applies the replacement rule; returns true when the entry changed.
    bool Update(Address destination, Address nextHop, unsigned metric, SequenceNumber seq, SimTime validUntil);
    /// Extends the lifetime of a usable entry.
    void Refresh(Address destination, SimTime now, SimTime hold);
    /// Invalidates every usable entry through nextHop; returns their destinations.
    std::vector<Address> InvalidateVia(Address nextHop, SimTime now);
    void Invalidate(Address destination);
    void MarkBidirectional(Address nextHop);
    void ExpireStale(SimTime now);

    const std::map<uint64_t, RouteEntry>& Entries() const
    {
        return m_entries;
    }

  private:
    std::map<uint64_t, RouteEntry> m_entries;
};

/// Neighbors with unidirectional connectivity; expired entries are ignored.
class BlacklistNeighborSet
{
  public:
    void Add(Address neighbor, SimTime until);
    bool IsBlacklisted(Address neighbor, SimTime now) const;
    std::optional<SimTime> BlacklistedUntil(Address neighbor) const;
    void Purge(SimTime now);
    std::size_t Size() const
    {
        return m_until.size();
    }

  private:
    std::map<uint64_t, SimTime> m_until;
};

struct PendingAck
{
    Address neighbor;
    SequenceNumber rrepSeq;
    SimTime deadline;
};

/// One tuple per RREP sent that still awaits its RREP-ACK.
class PendingAcknowledgmentSet
{
  public:
    void Add(Address neighbor, SequenceNumber rrepSeq, SimTime deadline);
    bool Remove(Address neighbor, SequenceNumber rrepSeq);
    std::vector<PendingAck> TakeExpired(SimTime now);
    bool Contains(Address neighbor, SequenceNumber rrepSeq) const;
    std::size_t Size() const
    {
        return m_tuples.size();
    }

  private:
    std::vector<PendingAck> m_tuples;
};

struct LocalInterface
{
    unsigned id;
    Address address;
};

class Router final : public RoutingProtocol
{
  public:
    Router(Address self, ProtocolTimers timers);

    Address GetAddress() const override
    {
        return m_self;
    }
    bool OwnsAddress(Address a) const override
    {
        return m_destinationAddresses.contains(a);
    }

    RouterActions SendData(const DataPacket& pkt, SimTime now) override;
    RouterActions ReceiveData(const DataPacket& pkt, Address prevHop, SimTime now) override;
    RouterActions ReceiveControl(const ControlMessage& msg, Address prevHop, SimTime now) override;
    RouterActions DataLinkFailed(Address nextHop, const DataPacket& pkt, SimTime now) override;
    RouterActions ControlLinkFailed(Address nextHop, const ControlMessage& msg, SimTime now) override;
    RouterActions Tick(SimTime now) override;

    std::optional<RouteView> LookupRoute(Address destination, SimTime now) const override;
    std::vector<RouteView> RoutingSnapshot(SimTime now) const override;
    const RouterCounters& Counters() const override
    {
        return m_counters;
    }

    RouterActions OriginateDiscovery(Address destination, const DataPacket& pkt, SimTime now);
    RouterActions ProcessRreq(const ControlMessage& rreq, Address prevHop, SimTime now);
    RouterActions ProcessRrep(const ControlMessage& rrep, Address prevHop, SimTime now);
    RouterActions ProcessRrepAck(const ControlMessage& ack, Address prevHop, SimTime now);
    RouterActions ProcessRerr(const ControlMessage& rerr, Address prevHop, SimTime now);
    RouterActions ExpirePendingAck(SimTime now);
    /// orphan is the data packet whose forwarding failed, when there is one.
    RouterActions DetectBrokenRoute(Address failedNextHop, const DataPacket* orphan, SimTime now);

    /// Extra address this router answers route requests for.
    void AddDestinationAddress(Address a)
    {
        m_destinationAddresses.insert(a);
    }

    const RoutingSet& Routes() const
    {
        return m_routes;
    }
    RoutingSet& MutableRoutes()
    {
        return m_routes;
    }
    const BlacklistNeighborSet& Blacklist() const
    {
        return m_blacklist;
    }
    const PendingAcknowledgmentSet& PendingAcks() const
    {
        return m_pendingAcks;
    }
    const DiscoveryTable& Discoveries() const
    {
        return m_discoveries;
    }
    const std::vector<LocalInterface>& LocalInterfaces() const
    {
        return m_interfaces;
    }
    SequenceNumber OwnSeq() const
    {
        return m_seq;
    }

  private:
    ControlMessage MakeRreq(Address destination, SimTime now);
    void ForwardData(DataPacket pkt, const RouteEntry& route, SimTime now, RouterActions& out);
    void FlushPending(Address destination, SimTime now, RouterActions& out);
    void SendRerrToward(Address source, Address unreachable, SimTime now, RouterActions& out);

    Address m_self;
    ProtocolTimers m_timers;
    SequenceNumber m_seq;
    RoutingSet m_routes;
    BlacklistNeighborSet m_blacklist;
    PendingAcknowledgmentSet m_pendingAcks;
    std::set<Address> m_destinationAddresses;
    std::vector<LocalInterface> m_interfaces;
    RreqDedupCache m_dedup;
    DiscoveryTable m_discoveries;
    RouterCounters m_counters;
};

} // namespace llnroute::loadng
