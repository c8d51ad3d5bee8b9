#pragma once

#include "llnroute/router.h"

#include <map>
#include <set>
#include <vector>

namespace llnroute::aodv
{

struct AodvRouteEntry
{
    Address destination;
    Address nextHop;
    unsigned hopCount{0};
    SequenceNumber destSeq;
    SimTime validUntil{0};
    bool valid{false};
    std::set<Address> precursors;

    bool IsUsable(SimTime now) const
    {
        return valid && now <= validUntil;
    }
};

class RoutingTable
{
  public:
    const AodvRouteEntry* Find(Address destination) const;
    AodvRouteEntry* Find(Address destination);
    const AodvRouteEntry* Lookup(Address destination, SimTime now) const;
    AodvRouteEntry* Lookup(Address destination, SimTime now);

    /// Applies the replacement rule; precursors survive replacement.
    bool Update(Address destination, Address nextHop, unsigned hopCount, SequenceNumber seq, SimTime validUntil);
    void Refresh(Address destination, SimTime now, SimTime hold);
    void ExpireStale(SimTime now);

    const std::map<uint64_t, AodvRouteEntry>& Entries() const
    {
        return m_entries;
    }
    std::map<uint64_t, AodvRouteEntry>& MutableEntries()
    {
        return m_entries;
    }

  private:
    std::map<uint64_t, AodvRouteEntry> m_entries;
};

/**
 * Minimal RFC 3561 profile: intermediate replies with gratuitous RREP,
 * precursor lists, destination sequence numbers and precursor-directed RERR.
 * No HELLO, no local repair, no expanding ring search.
 */
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
        return a == m_self;
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

    RouterActions ProcessRreq(const ControlMessage& rreq, Address prevHop, SimTime now);
    RouterActions ProcessRrep(const ControlMessage& rrep, Address prevHop, SimTime now);
    RouterActions ProcessRerr(const ControlMessage& rerr, Address prevHop, SimTime now);
    RouterActions DetectBrokenRoute(Address failedNextHop, const DataPacket* orphan, SimTime now);

    const RoutingTable& Routes() const
    {
        return m_routes;
    }
    RoutingTable& MutableRoutes()
    {
        return m_routes;
    }
    const DiscoveryTable& Discoveries() const
    {
        return m_discoveries;
    }
    SequenceNumber OwnSeq() const
    {
        return m_seq;
    }

  private:
    ControlMessage MakeRreq(Address destination, SimTime now);
    void ForwardData(DataPacket pkt, const AodvRouteEntry& route, SimTime now, RouterActions& out);
    void FlushPending(Address destination, SimTime now, RouterActions& out);
    /// One RERR per precursor, listing the lost destinations it relied on.
    void NotifyPrecursors(const std::vector<Address>& lost, Address exclude, RouterActions& out);

    Address m_self;
    ProtocolTimers m_timers;
    SequenceNumber m_seq;
    RoutingTable m_routes;
    RreqDedupCache m_dedup;
    DiscoveryTable m_discoveries;
    RouterCounters m_counters;
};

} // namespace llnroute::aodv
