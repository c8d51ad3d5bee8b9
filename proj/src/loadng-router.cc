#include "llnroute/loadng-router.h"

#include <algorithm>

namespace llnroute::loadng
{

const RouteEntry*
RoutingSet::Find(Address destination) const
{
    auto it = m_entries.find(destination.value);
    return it == m_entries.end() ? nullptr : &it->second;
}

RouteEntry*
RoutingSet::Find(Address destination)
{
    auto it = m_entries.find(destination.value);
    return it == m_entries.end() ? nullptr : &it->second;
}

const RouteEntry*
RoutingSet::Lookup(Address destination, SimTime now) const
{
    const auto* e = Find(destination);
    return (e && e->IsUsable(now)) ? e : nullptr;
}

bool
RoutingSet::Update(Address destination,
                   Address nextHop,
                   unsigned metric,
                   SequenceNumber seq,
                   SimTime validUntil)
{
    auto* e = Find(destination);
    if (e && !ShouldReplaceRoute(e->valid, e->seq, e->metric, seq, metric))
    {
        return false;
    }
    RouteEntry entry;
    entry.destination = destination;
    entry.nextHop = nextHop;
    entry.metric = metric;
    entry.seq = seq;
    entry.validUntil = validUntil;
    entry.valid = true;
    // Confirmation belongs to the link, so keep it when the next hop is unchanged.
    entry.bidirectionalConfirmed = e && e->nextHop == nextHop && e->bidirectionalConfirmed;
    m_entries[destination.value] = entry;
    return true;
}

void
RoutingSet::Refresh(Address destination, SimTime now, SimTime hold)
{
    auto* e = Find(destination);
    if (e && e->IsUsable(now))
    {
        e->validUntil = std::max(e->validUntil, now + hold);
    }
}

std::vector<Address>
RoutingSet::InvalidateVia(Address nextHop, SimTime now)
{
    std::vector<Address> lost;
    for (auto& [key, e] : m_entries)
    {
        if (e.nextHop == nextHop && e.IsUsable(now))
        {
            e.valid = false;
            lost.push_back(e.destination);
        }
    }
    return lost;
}

void
RoutingSet::Invalidate(Address destination)
{
    if (auto* e = Find(destination))
    {
        e->valid = false;
    }
}

void
RoutingSet::MarkBidirectional(Address nextHop)
{
    for (auto& [key, e] : m_entries)
    {
        if (e.nextHop == nextHop)
        {
            e.bidirectionalConfirmed = true;
        }
    }
}

void
RoutingSet::ExpireStale(SimTime now)
{
    for (auto& [key, e] : m_entries)
    {
        if (e.valid && e.validUntil < now)
        {
            e.valid = false;
        }
    }
}

void
BlacklistNeighborSet::Add(Address neighbor, SimTime until)
{
    auto& slot = m_until[neighbor.value];
    slot = std::max(slot, until);
}

bool
BlacklistNeighborSet::IsBlacklisted(Address neighbor, SimTime now) const
{
    auto it = m_until.find(neighbor.value);
    return it != m_until.end() && now < it->second;
}

std::optional<SimTime>
BlacklistNeighborSet::BlacklistedUntil(Address neighbor) const
{
    auto it = m_until.find(neighbor.value);
    if (it == m_until.end())
    {
        return std::nullopt;
    }
    return it->second;
}

void
BlacklistNeighborSet::Purge(SimTime now)
{
    std::erase_if(m_until, [now](const auto& kv) { return kv.second <= now; });
}

void
PendingAcknowledgmentSet::Add(Address neighbor, SequenceNumber rrepSeq, SimTime deadline)
{
    for (auto& t : m_tuples)
    {
        if (t.neighbor == neighbor && t.rrepSeq == rrepSeq)
        {
            t.deadline = deadline;
            return;
        }
    }
    m_tuples.push_back(PendingAck{neighbor, rrepSeq, deadline});
}

bool
PendingAcknowledgmentSet::Remove(Address neighbor, SequenceNumber rrepSeq)
{
    auto n = std::erase_if(m_tuples, [&](const PendingAck& t) {
        return t.neighbor == neighbor && t.rrepSeq == rrepSeq;
    });
    return n > 0;
}

std::vector<PendingAck>
PendingAcknowledgmentSet::TakeExpired(SimTime now)
{
    std::vector<PendingAck> expired;
    std::erase_if(m_tuples, [&](const PendingAck& t) {
        if (t.deadline <= now)
        {
            expired.push_back(t);
            return true;
        }
        return false;
    });
    return expired;
}

bool
PendingAcknowledgmentSet::Contains(Address neighbor, SequenceNumber rrepSeq) const
{
    return std::any_of(m_tuples.begin(), m_tuples.end(), [&](const PendingAck& t) {
        return t.neighbor == neighbor && t.rrepSeq == rrepSeq;
    });
}

Router::Router(Address self, ProtocolTimers timers)
    : m_self(self),
      m_timers(timers),
      m_destinationAddresses{self},
      m_interfaces{LocalInterface{0, self}},
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
    rreq.kind = MessageKind::LoadngRreq;
    rreq.originator = m_self;
    rreq.destination = destination;
    rreq.seq = m_seq;
    rreq.hopCount = 0;
    rreq.hopLimit = m_timers.hopLimit;
    rreq.metric = 0;
    return rreq;
}

void
Router::ForwardData(DataPacket pkt, const RouteEntry& route, SimTime now, RouterActions& out)
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
    const auto nextHop = *route;
    for (auto& pkt : m_discoveries.Take(destination))
    {
        ForwardData(pkt, nextHop, now, out);
    }
}

void
Router::SendRerrToward(Address source, Address unreachable, SimTime now, RouterActions& out)
{
    const auto* back = m_routes.Lookup(source, now);
    if (!back)
    {
        ++m_counters.rerrUnroutable;
        return;
    }
    ControlMessage rerr;
    rerr.kind = MessageKind::LoadngRerr;
    rerr.originator = m_self;
    rerr.destination = source;
    rerr.seq = m_seq;
    rerr.hopLimit = m_timers.hopLimit;
    rerr.unreachable.push_back(UnreachableDestination{unreachable, SequenceNumber{}});
    out.emplace_back(action::UnicastControl{rerr, back->nextHop});
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
    return OriginateDiscovery(pkt.dst, pkt, now);
}

RouterActions
Router::OriginateDiscovery(Address destination, const DataPacket& pkt, SimTime now)
{
    RouterActions out;
    if (OwnsAddress(destination))
    {
        out.emplace_back(action::DeliverData{pkt});
        return out;
    }
    if (m_discoveries.IsPending(destination))
    {
        if (auto evicted = m_discoveries.Buffer(pkt))
        {
            out.emplace_back(action::DropData{*evicted, DropReason::BufferFull});
        }
        return out;
    }
    const auto deadline = m_discoveries.Start(pkt, now);
    ++m_counters.discoveriesStarted;
    out.emplace_back(action::BroadcastControl{MakeRreq(destination, now)});
    out.emplace_back(action::StartTimer{TimerKind::DiscoveryRetry, deadline});
    return out;
}

RouterActions
Router::ReceiveData(const DataPacket& pkt, Address /*prevHop*/, SimTime now)
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
    SendRerrToward(pkt.src, pkt.dst, now, out);
    return out;
}

RouterActions
Router::ReceiveControl(const ControlMessage& msg, Address prevHop, SimTime now)
{
    switch (msg.kind)
    {
    case MessageKind::LoadngRreq:
        return ProcessRreq(msg, prevHop, now);
    case MessageKind::LoadngRrep:
        return ProcessRrep(msg, prevHop, now);
    case MessageKind::LoadngRrepAck:
        return ProcessRrepAck(msg, prevHop, now);
    case MessageKind::LoadngRerr:
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
    // Unidirectional links must not seed routes.
    if (m_blacklist.IsBlacklisted(prevHop, now))
    {
        ++m_counters.rreqBlacklisted;
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

    if (forMe)
    {
        const auto* back = m_routes.Lookup(rreq.originator, now);
        if (!back)
        {
            return out;
        }
        ++m_seq;
        ControlMessage rrep;
        rrep.kind = MessageKind::LoadngRrep;
        rrep.originator = rreq.destination;
        rrep.destination = rreq.originator;
        rrep.seq = m_seq;
        rrep.hopCount = 0;
        rrep.hopLimit = m_timers.hopLimit;
        rrep.metric = 0;
        const auto deadline = now + m_timers.rrepAckTimeout;
        m_pendingAcks.Add(back->nextHop, rrep.seq, deadline);
        out.emplace_back(action::UnicastControl{rrep, back->nextHop});
        out.emplace_back(action::StartTimer{TimerKind::PendingAck, deadline});
        return out;
    }

    if (metric >= rreq.hopLimit)
    {
        return out;
    }
    ControlMessage fwd = rreq;
    fwd.hopCount = static_cast<uint8_t>(metric);
    fwd.metric = static_cast<uint16_t>(metric);
    if (const auto* route = m_routes.Lookup(rreq.destination, now))
    {
        // Smart RREQ: follow the known route instead of flooding.
        out.emplace_back(action::UnicastControl{fwd, route->nextHop});
    }
    else
    {
        out.emplace_back(action::BroadcastControl{fwd});
    }
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
    const RouteEntry* back = nullptr;
    if (!forMe)
    {
        back = m_routes.Lookup(rrep.destination, now);
        if (!back)
        {
            ++m_counters.rrepOrphaned;
            return out;
        }
    }
    const Address backHop = back ? back->nextHop : Address{};

    const unsigned metric = rrep.hopCount + 1u;
    const bool installed =
        m_routes.Update(rrep.originator, prevHop, metric, rrep.seq, now + m_timers.routeHold);

    ControlMessage ack;
    ack.kind = MessageKind::LoadngRrepAck;
    ack.originator = m_self;
    ack.destination = prevHop;
    ack.seq = rrep.seq;
    out.emplace_back(action::UnicastControl{ack, prevHop});

    if (forMe)
    {
        FlushPending(rrep.originator, now, out);
        return out;
    }
    if (!installed || metric >= rrep.hopLimit)
    {
        return out;
    }
    m_routes.Refresh(rrep.destination, now, m_timers.routeHold);
    ControlMessage fwd = rrep;
    fwd.hopCount = static_cast<uint8_t>(metric);
    fwd.metric = static_cast<uint16_t>(metric);
    const auto deadline = now + m_timers.rrepAckTimeout;
    m_pendingAcks.Add(backHop, fwd.seq, deadline);
    out.emplace_back(action::UnicastControl{fwd, backHop});
    out.emplace_back(action::StartTimer{TimerKind::PendingAck, deadline});
    FlushPending(rrep.originator, now, out);
    return out;
}

RouterActions
Router::ProcessRrepAck(const ControlMessage& ack, Address prevHop, SimTime /*now*/)
{
    if (m_pendingAcks.Remove(prevHop, ack.seq))
    {
        m_routes.MarkBidirectional(prevHop);
    }
    return {};
}

RouterActions
Router::ProcessRerr(const ControlMessage& rerr, Address prevHop, SimTime now)
{
    RouterActions out;
    for (const auto& u : rerr.unreachable)
    {
        const auto* e = m_routes.Find(u.address);
        if (e && e->nextHop == prevHop)
        {
            m_routes.Invalidate(u.address);
        }
    }
    if (OwnsAddress(rerr.destination))
    {
        return out;
    }
    const auto* route = m_routes.Lookup(rerr.destination, now);
    if (!route || rerr.hopCount + 1u >= rerr.hopLimit)
    {
        ++m_counters.rerrUnroutable;
        return out;
    }
    ControlMessage fwd = rerr;
    fwd.hopCount = static_cast<uint8_t>(rerr.hopCount + 1u);
    out.emplace_back(action::UnicastControl{fwd, route->nextHop});
    return out;
}

RouterActions
Router::ExpirePendingAck(SimTime now)
{
    for (const auto& t : m_pendingAcks.TakeExpired(now))
    {
        m_blacklist.Add(t.neighbor, now + m_timers.blacklistTime);
    }
    return {};
}

RouterActions
Router::DetectBrokenRoute(Address failedNextHop, const DataPacket* orphan, SimTime now)
{
    RouterActions out;
    const auto lost = m_routes.InvalidateVia(failedNextHop, now);
    if (!orphan)
    {
        return out;
    }
    out.emplace_back(action::DropData{*orphan, DropReason::LinkFailure});
    if (lost.empty() || OwnsAddress(orphan->src))
    {
        return out;
    }
    SendRerrToward(orphan->src, orphan->dst, now, out);
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
    RouterActions out = ExpirePendingAck(now);
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
    m_blacklist.Purge(now);
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
    return RouteView{e->destination, e->nextHop, e->metric, e->seq,
                     e->validUntil, true, e->bidirectionalConfirmed};
}

std::vector<RouteView>
Router::RoutingSnapshot(SimTime now) const
{
    std::vector<RouteView> out;
    for (const auto& [key, e] : m_routes.Entries())
    {
        out.push_back(RouteView{e.destination, e.nextHop, e.metric, e.seq, e.validUntil,
                                e.IsUsable(now), e.bidirectionalConfirmed});
    }
    return out;
}

} // namespace llnroute::loadng
