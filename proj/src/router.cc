#include "llnroute/router.h"

#include <sstream>

namespace llnroute
{

std::string_view
ToString(DropReason reason)
{
    switch (reason)
    {
    case DropReason::BufferFull:
        return "BUFFER_FULL";
    case DropReason::DiscoveryFailed:
        return "DISCOVERY_FAILED";
    case DropReason::NoRoute:
        return "NO_ROUTE";
    case DropReason::LinkFailure:
        return "LINK_FAILURE";
    case DropReason::HopLimit:
        return "HOP_LIMIT";
    }
    return "UNKNOWN";
}

RouterCounters&
RouterCounters::operator+=(const RouterCounters& o)
{
    rrepOrphaned += o.rrepOrphaned;
    rerrUnroutable += o.rerrUnroutable;
    rreqDuplicates += o.rreqDuplicates;
    rreqBlacklisted += o.rreqBlacklisted;
    discoveriesStarted += o.discoveriesStarted;
    discoveriesFailed += o.discoveriesFailed;
    return *this;
}

std::string
FormatRouteDump(const std::vector<RouteView>& routes)
{
    std::ostringstream os;
    for (const auto& r : routes)
    {
        os << r.destination << ' ' << r.nextHop << ' ' << r.metric << ' ' << r.seq << ' '
           << r.validUntil.count() << ' ' << (r.bidirectional ? 1 : 0) << '\n';
    }
    return os.str();
}

bool
RreqDedupCache::Admit(Address originator, SequenceNumber seq, unsigned metric, SimTime now)
{
    const auto key = std::make_pair(originator.value, seq.Value());
    auto it = m_entries.find(key);
    if (it == m_entries.end() || it->second.expiry <= now)
    {
        m_entries[key] = Entry{metric, now + m_hold};
        return true;
    }
    if (metric < it->second.bestMetric)
    {
        it->second.bestMetric = metric;
        return true;
    }
    return false;
}

void
RreqDedupCache::Purge(SimTime now)
{
    std::erase_if(m_entries, [now](const auto& kv) { return kv.second.expiry <= now; });
}

SimTime
DiscoveryTable::BackoffFor(unsigned attempt) const
{
    return m_timers.rreqBackoff * (int64_t{1} << attempt);
}

SimTime
DiscoveryTable::Start(const DataPacket& pkt, SimTime now)
{
    PendingDiscovery d;
    d.destination = pkt.dst;
    d.buffered.push_back(pkt);
    d.retriesLeft = m_timers.rreqRetries;
    d.attempt = 0;
    d.nextRetryAt = now + BackoffFor(0);
    const auto deadline = d.nextRetryAt;
    m_pending[pkt.dst.value] = std::move(d);
    return deadline;
}

std::optional<DataPacket>
DiscoveryTable::Buffer(const DataPacket& pkt)
{
    auto& d = m_pending.at(pkt.dst.value);
    d.buffered.push_back(pkt);
    if (d.buffered.size() > m_timers.bufferCap)
    {
        auto oldest = d.buffered.front();
        d.buffered.pop_front();
        return oldest;
    }
    return std::nullopt;
}

std::deque<DataPacket>
DiscoveryTable::Take(Address destination)
{
    auto it = m_pending.find(destination.value);
    if (it == m_pending.end())
    {
        return {};
    }
    auto packets = std::move(it->second.buffered);
    m_pending.erase(it);
    return packets;
}

std::vector<DiscoveryTable::Due>
DiscoveryTable::Advance(SimTime now)
{
    std::vector<Due> due;
    for (auto it = m_pending.begin(); it != m_pending.end();)
    {
        auto& d = it->second;
        if (d.nextRetryAt > now)
        {
            ++it;
            continue;
        }
        if (d.retriesLeft > 0)
        {
            --d.retriesLeft;
            ++d.attempt;
            d.nextRetryAt = now + BackoffFor(d.attempt);
            due.push_back(Due{d.destination, true, d.nextRetryAt, {}});
            ++it;
        }
        else
        {
            due.push_back(Due{d.destination, false, SimTime{0}, std::move(d.buffered)});
            it = m_pending.erase(it);
        }
    }
    return due;
}

const PendingDiscovery*
DiscoveryTable::Find(Address destination) const
{
    auto it = m_pending.find(destination.value);
    return it == m_pending.end() ? nullptr : &it->second;
}

bool
ShouldReplaceRoute(bool incumbentValid,
                   SequenceNumber incumbentSeq,
                   unsigned incumbentMetric,
                   SequenceNumber candidateSeq,
                   unsigned candidateMetric)
{
    if (SeqNumIsNewer(candidateSeq, incumbentSeq))
    {
        return true;
    }
    if (candidateSeq == incumbentSeq)
    {
        return !incumbentValid || candidateMetric < incumbentMetric;
    }
    return false;
}

} // namespace llnroute
