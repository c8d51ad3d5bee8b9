#include "llnroute/aodv-router.h"

#include <algorithm>

namespace llnroute::aodv
{

const AodvRouteEntry*
RoutingTable::Find(Address destination) const
{
    auto it = m_entries.find(destination.value);
    return it == m_entries.end() ? nullptr : &it->second;
}

AodvRouteEntry*
RoutingTable::Find(Address destination)
{
    auto it = m_entries.find(destination.value);
    return it == m_entries.end() ? nullptr : &it->second;
}

const AodvRouteEntry*
RoutingTable::Lookup(Address destination, SimTime now) const
{
    const auto* e = Find(destination);
    return (e && e->IsUsable(now)) ? e : nullptr;
}

AodvRouteEntry*
RoutingTable::Lookup(Address destination, SimTime now)
{
    auto* e = Find(destination);
    return (e && e->IsUsable(now)) ? e : nullptr;
}

bool
RoutingTable::Update(Address destination,
                     Address nextHop,
                     unsigned hopCount,
                     SequenceNumber seq,
                     SimTime validUntil)
{
    auto& e = m_entries[destination.value];
    const bool fresh = e.destination.IsUnspecified();
    if (!fresh && !ShouldReplaceRoute(e.valid, e.destSeq, e.hopCount, seq, hopCount))
    {
        return false;
    }
    e.destination = destination;
    e.nextHop = nextHop;
    e.hopCount = hopCount;
    e.destSeq = seq;
    e.validUntil = validUntil;
    e.valid = true;
    return true;
}

void
RoutingTable::Refresh(Address destination, SimTime now, SimTime hold)
{
    auto* e = Lookup(destination, now);
    if (e)
    {
        e->validUntil = std::max(e->validUntil, now + hold);
    }
}

void
RoutingTable::ExpireStale(SimTime now)
{
    for (auto& [key, e] : m_entries)
    {
        if (e.valid && e.validUntil < now)
        {
            e.valid = false;
        }
    }
}

Router::Router(Address self, ProtocolTimers timers)
    : m_self(self),
      m_timers(timers),
      m_dedup(timers.rreqDedupHold),
      m_discoveries(timers)
{
}

ControlMessage
Router::MakeRreq(Address destination, SimTime now)
{
    ++m_seq;
    m_dedup.Admit(m_self, m_seq, 0, now);
    ControlMessage rreq;
    rreq.kind = MessageKind::AodvRreq;
    rreq.originator = m_self;
    rreq.destination = destination;
    rreq.seq = m_seq;
    rreq.hopCount = 0;
    rreq.hopLimit = m_timers.hopLimit;
    if (const auto* known = m_routes.Find(destination))
    {
        rreq.aodvDestSeq = known->destSeq;
    }
    return rreq;
}

void
Router::ForwardData(DataPacket pkt, const AodvRouteEntry& route, SimTime now, RouterActions& out)
{
    m_routes.Refresh(pkt.dst, now, m_timers.routeHold);
    m_routes.Refresh(pkt.src, now, m_timers.routeHold);
    ++pkt.hops;
    out.emplace_back(action::UnicastData{pkt, route.nextHop});
}

void
Router::FlushPending(Address destination, SimTime now, RouterActions& out)
{
    const auto* route = m_routes.Lookup(destination, now);
    if (!route || !m_discoveries.IsPending(destination))
    {
        return;
    }
    const auto entry = *route;
    for (auto& pkt : m_discoveries.Take(destination))
    {
        ForwardData(pkt, entry, now, out);
    }
}

void
Router::NotifyPrecursors(const std::vector<Address>& lost, Address exclude, RouterActions& out)
{
    std::map<uint64_t, std::vector<UnreachableDestination>> perPrecursor;
    for (const auto& dest : lost)
    {
        const auto* e = m_routes.Find(dest);
        if (!e)
        {
            continue;
        }
        for (const auto& p : e->precursors)
        {
            if (p != exclude)
            {
                perPrecursor[p.value].push_back(UnreachableDestination{dest, e->destSeq});
            }
        }
    }
    for (auto& [precursor, unreachable] : perPrecursor)
    {
        ControlMessage rerr;
        rerr.kind = MessageKind::AodvRerr;
        rerr.originator = m_self;
        rerr.destination = Address{precursor};
        rerr.hopLimit = 1;
        rerr.unreachable = std::move(unreachable);
        out.emplace_back(action::UnicastControl{rerr, Address{precursor}});
    }
}

RouterActions
Router::SendData(const DataPacket& pkt, SimTime now)
{
    RouterActions out;
    if (OwnsAddress(pkt.dst))
    {
        out.emplace_back(action::DeliverData{pkt});
        return out;
    }
    if (const auto* route = m_routes.Lookup(pkt.dst, now))
    {
        ForwardData(pkt, *route, now, out);
        return out;
    }
    if (m_discoveries.IsPending(pkt.dst))
    {
        if (auto evicted = m_discoveries.Buffer(pkt))
        {
            out.emplace_back(action::DropData{*evicted, DropReason::BufferFull});
        }
        return out;
    }
    const auto deadline = m_discoveries.Start(pkt, now);
    ++m_counters.discoveriesStarted;
    out.emplace_back(action::BroadcastControl{MakeRreq(pkt.dst, now)});
    out.emplace_back(action::StartTimer{TimerKind::DiscoveryRetry, deadline});
    return out;
}

RouterActions
Router::ReceiveData(const DataPacket& pkt, Address prevHop, SimTime now)
{
    RouterActions out;
    if (OwnsAddress(pkt.dst))
    {
        m_routes.Refresh(pkt.src, now, m_timers.routeHold);
        out.emplace_back(action::DeliverData{pkt});
        return out;
    }
    if (pkt.hops >= m_timers.hopLimit)
    {
        out.emplace_back(action::DropData{pkt, DropReason::HopLimit});
        return out;
    }
    if (const auto* route = m_routes.Lookup(pkt.dst, now))
    {
        ForwardData(pkt, *route, now, out);
        return out;
    }
    out.emplace_back(action::DropData{pkt, DropReason::NoRoute});
    // No active route: tell the neighbor that handed us the packet.
    ControlMessage rerr;
    rerr.kind = MessageKind::AodvRerr;
    rerr.originator = m_self;
    rerr.destination = prevHop;
    rerr.hopLimit = 1;
    const auto* known = m_routes.Find(pkt.dst);
    rerr.unreachable.push_back(
        UnreachableDestination{pkt.dst, known ? known->destSeq : SequenceNumber{}});
    out.emplace_back(action::UnicastControl{rerr, prevHop});
    return out;
}

RouterActions
Router::ReceiveControl(const ControlMessage& msg, Address prevHop, SimTime now)
{
    switch (msg.kind)
    {
    case MessageKind::AodvRreq:
        return ProcessRreq(msg, prevHop, now);
    case MessageKind::AodvRrep:
        return ProcessRrep(msg, prevHop, now);
    case MessageKind::AodvRerr:
        return ProcessRerr(msg, prevHop, now);
    default:
        return {};
    }
}

RouterActions
Router::ProcessRreq(const ControlMessage& rreq, Address prevHop, SimTime now)
{
    RouterActions out;
    if (rreq.originator == m_self)
    {
        ++m_counters.rreqDuplicates;
        return out;
    }
    const bool forMe = OwnsAddress(rreq.destination);
    if (!forMe && rreq.hopCount >= rreq.hopLimit)
    {
        return out;
    }
    const unsigned metric = rreq.hopCount + 1u;
    if (!m_dedup.Admit(rreq.originator, rreq.seq, metric, now))
    {
        ++m_counters.rreqDuplicates;
        return out;
    }
    m_routes.Update(rreq.originator, prevHop, metric, rreq.seq, now + m_timers.routeHold);
    FlushPending(rreq.originator, now, out);

    auto* back = m_routes.Lookup(rreq.originator, now);
    if (!back)
    {
        return out;
    }
    const Address backHop = back->nextHop;
    const unsigned backHops = back->hopCount;

    if (forMe)
    {
        if (rreq.aodvDestSeq && SeqNumIsNewer(*rreq.aodvDestSeq, m_seq))
        {
            m_seq = *rreq.aodvDestSeq;
        }
        ++m_seq;
        ControlMessage rrep;
        rrep.kind = MessageKind::AodvRrep;
        rrep.originator = m_self;
        rrep.destination = rreq.originator;
        rrep.seq = m_seq;
        rrep.hopCount = 0;
        rrep.hopLimit = m_timers.hopLimit;
        out.emplace_back(action::UnicastControl{rrep, backHop});
        return out;
    }

    auto* cached = m_routes.Lookup(rreq.destination, now);
    if (cached && (!rreq.aodvDestSeq || !SeqNumIsNewer(*rreq.aodvDestSeq, cached->destSeq)))
    {
        ControlMessage rrep;
        rrep.kind = MessageKind::AodvRrep;
        rrep.originator = rreq.destination;
        rrep.destination = rreq.originator;
        rrep.seq = cached->destSeq;
        rrep.hopCount = static_cast<uint8_t>(cached->hopCount);
        rrep.hopLimit = m_timers.hopLimit;
        out.emplace_back(action::UnicastControl{rrep, backHop});

        ControlMessage gratuitous;
        gratuitous.kind = MessageKind::AodvRrep;
        gratuitous.originator = rreq.originator;
        gratuitous.destination = rreq.destination;
        gratuitous.seq = rreq.seq;
        gratuitous.hopCount = static_cast<uint8_t>(backHops);
        gratuitous.hopLimit = m_timers.hopLimit;
        out.emplace_back(action::UnicastControl{gratuitous, cached->nextHop});

        cached->precursors.insert(backHop);
        const Address towardDest = cached->nextHop;
        m_routes.Find(rreq.originator)->precursors.insert(towardDest);
        return out;
    }

    if (metric >= rreq.hopLimit)
    {
        return out;
    }
    ControlMessage fwd = rreq;
    fwd.hopCount = static_cast<uint8_t>(metric);
    fwd.metric = static_cast<uint16_t>(metric);
    if (const auto* known = m_routes.Find(rreq.destination))
    {
        if (!fwd.aodvDestSeq || SeqNumIsNewer(known->destSeq, *fwd.aodvDestSeq))
        {
            fwd.aodvDestSeq = known->destSeq;
        }
    }
    out.emplace_back(action::BroadcastControl{fwd});
    return out;
}

RouterActions
Router::ProcessRrep(const ControlMessage& rrep, Address prevHop, SimTime now)
{
    RouterActions out;
    if (OwnsAddress(rrep.originator))
    {
        return out;
    }
    const bool forMe = OwnsAddress(rrep.destination);
    Address backHop;
    if (!forMe)
    {
        const auto* back = m_routes.Lookup(rrep.destination, now);
        if (!back)
        {
            ++m_counters.rrepOrphaned;
            return out;
        }
        backHop = back->nextHop;
    }

    const unsigned metric = rrep.hopCount + 1u;
    const bool installed =
        m_routes.Update(rrep.originator, prevHop, metric, rrep.seq, now + m_timers.routeHold);
    if (forMe)
    {
        FlushPending(rrep.originator, now, out);
        return out;
    }
    if (!installed || metric >= rrep.hopLimit)
    {
        return out;
    }
    m_routes.Find(rrep.originator)->precursors.insert(backHop);
    m_routes.Find(rrep.destination)->precursors.insert(prevHop);
    m_routes.Refresh(rrep.destination, now, m_timers.routeHold);

    ControlMessage fwd = rrep;
    fwd.hopCount = static_cast<uint8_t>(metric);
    fwd.metric = static_cast<uint16_t>(metric);
    out.emplace_back(action::UnicastControl{fwd, backHop});
    FlushPending(rrep.originator, now, out);
    return out;
}

RouterActions
Router::ProcessRerr(const ControlMessage& rerr, Address prevHop, SimTime now)
{
    RouterActions out;
    std::vector<Address> lost;
    for (const auto& u : rerr.unreachable)
    {
        auto* e = m_routes.Lookup(u.address, now);
        if (e && e->nextHop == prevHop)
        {
            e->valid = false;
            if (SeqNumIsNewer(u.seq, e->destSeq))
            {
                e->destSeq = u.seq;
            }
            lost.push_back(u.address);
        }
    }
    NotifyPrecursors(lost, prevHop, out);
    return out;
}

RouterActions
Router::DetectBrokenRoute(Address failedNextHop, const DataPacket* orphan, SimTime now)
{
    RouterActions out;
    std::vector<Address> lost;
    for (auto& [key, e] : m_routes.MutableEntries())
    {
        if (e.nextHop == failedNextHop && e.IsUsable(now))
        {
            e.valid = false;
            ++e.destSeq;
            lost.push_back(e.destination);
        }
    }
    if (orphan)
    {
        out.emplace_back(action::DropData{*orphan, DropReason::LinkFailure});
    }
    NotifyPrecursors(lost, failedNextHop, out);
    return out;
}

RouterActions
Router::DataLinkFailed(Address nextHop, const DataPacket& pkt, SimTime now)
{
    return DetectBrokenRoute(nextHop, &pkt, now);
}

RouterActions
Router::ControlLinkFailed(Address nextHop, const ControlMessage& /*msg*/, SimTime now)
{
    return DetectBrokenRoute(nextHop, nullptr, now);
}

RouterActions
Router::Tick(SimTime now)
{
    RouterActions out;
    m_routes.ExpireStale(now);
    for (auto& due : m_discoveries.Advance(now))
    {
        if (due.retry)
        {
            out.emplace_back(action::BroadcastControl{MakeRreq(due.destination, now)});
            out.emplace_back(action::StartTimer{TimerKind::DiscoveryRetry, due.nextDeadline});
        }
        else
        {
            ++m_counters.discoveriesFailed;
            for (auto& pkt : due.dropped)
            {
                out.emplace_back(action::DropData{pkt, DropReason::DiscoveryFailed});
            }
        }
    }
    m_dedup.Purge(now);
    return out;
}

std::optional<RouteView>
Router::LookupRoute(Address destination, SimTime now) const
{
    const auto* e = m_routes.Lookup(destination, now);
    if (!e)
    {
        return std::nullopt;
    }
    return RouteView{e->destination, e->nextHop, e->hopCount, e->destSeq, e->validUntil, true, false};
}

std::vector<RouteView>
Router::RoutingSnapshot(SimTime now) const
{
    std::vector<RouteView> out;
    for (const auto& [key, e] : m_routes.Entries())
    {
        out.push_back(RouteView{e.destination, e.nextHop, e.hopCount, e.destSeq, e.validUntil,
                                e.IsUsable(now), false});
    }
    return out;
}

} // namespace llnroute::aodv
