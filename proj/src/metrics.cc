#include "llnroute/metrics.h"

#include <algorithm>
#include <string>

namespace llnroute
{

MetricsCollector::MetricsCollector(unsigned addressWidth, std::optional<Address> probe)
    : m_addressWidth(addressWidth),
      m_probe(probe)
{
}

MetricsCollector::Bucket
MetricsCollector::BucketOf(DataKind kind)
{
    switch (kind)
    {
    case DataKind::MeterReport:
        return Mp2p;
    case DataKind::AppAck:
        return AppAck;
    case DataKind::Config:
        return Config;
    }
    return Mp2p;
}

bool
MetricsCollector::Counts(const DataPacket& pkt) const
{
    return !m_probe || pkt.src == *m_probe || pkt.dst == *m_probe;
}

void
MetricsCollector::RecordSent(const DataPacket& pkt, SimTime /*now*/)
{
    const bool counts = Counts(pkt);
    if (!m_outstanding.emplace(pkt.id, counts).second)
    {
        throw AccountingError("packet id " + std::to_string(pkt.id) + " sent twice");
    }
    if (counts)
    {
        ++m_buckets[BucketOf(pkt.kind)].sent;
        ++m_inFlightCounted;
    }
}

void
MetricsCollector::RecordDelivered(const DataPacket& pkt, SimTime now)
{
    auto it = m_outstanding.find(pkt.id);
    if (it == m_outstanding.end())
    {
        throw AccountingError("delivery recorded for unknown packet id " + std::to_string(pkt.id));
    }
    const bool counts = it->second;
    m_outstanding.erase(it);
    if (counts)
    {
        auto& b = m_buckets[BucketOf(pkt.kind)];
        ++b.delivered;
        b.delaysUs.push_back((now - pkt.createdAt).count());
        --m_inFlightCounted;
    }
}

void
MetricsCollector::RecordDrop(const DataPacket& pkt, DropReason reason)
{
    auto it = m_outstanding.find(pkt.id);
    if (it == m_outstanding.end())
    {
        throw AccountingError("drop recorded for unknown packet id " + std::to_string(pkt.id));
    }
    const bool counts = it->second;
    m_outstanding.erase(it);
    if (counts)
    {
        ++m_drops[static_cast<std::size_t>(reason)];
        --m_inFlightCounted;
    }
}

void
MetricsCollector::RecordControlTx(const ControlMessage& msg)
{
    ++m_ctlPackets[static_cast<std::size_t>(msg.kind)];
    m_ctlBytes += SizeInOctets(msg, m_addressWidth);
}

DirectionStats
MetricsCollector::Summarize(const std::vector<const Collector*>& parts)
{
    DirectionStats s;
    std::vector<int64_t> delays;
    for (const auto* p : parts)
    {
        s.sent += p->sent;
        s.delivered += p->delivered;
        delays.insert(delays.end(), p->delaysUs.begin(), p->delaysUs.end());
    }
    s.noTraffic = s.sent == 0;
    s.pdr = s.noTraffic ? 1.0 : static_cast<double>(s.delivered) / static_cast<double>(s.sent);
    if (!delays.empty())
    {
        std::sort(delays.begin(), delays.end());
        int64_t total = 0;
        for (auto d : delays)
        {
            total += d;
        }
        s.delayMeanMs = static_cast<double>(total) / static_cast<double>(delays.size()) / 1e3;
        // Nearest-rank percentile.
        const auto rank = (delays.size() * 95 + 99) / 100;
        s.delayP95Ms = static_cast<double>(delays[rank - 1]) / 1e3;
    }
    return s;
}

MetricsReport
MetricsCollector::Finalize(SimTime duration) const
{
    MetricsReport r;
    r.mp2p = Summarize({&m_buckets[Mp2p]});
    r.appAck = Summarize({&m_buckets[AppAck]});
    r.config = Summarize({&m_buckets[Config]});
    r.p2mp = Summarize({&m_buckets[AppAck], &m_buckets[Config]});
    r.ctlPacketsByKind = m_ctlPackets;
    for (auto c : m_ctlPackets)
    {
        r.ctlPackets += c;
    }
    r.ctlBytes = m_ctlBytes;
    r.durationS = ToSeconds(duration);
    r.ctlBytesPerSecond = r.durationS > 0 ? static_cast<double>(m_ctlBytes) / r.durationS : 0.0;
    r.dropsByReason = m_drops;
    for (auto d : m_drops)
    {
        r.dropsTotal += d;
    }
    r.inFlight = m_inFlightCounted;
    return r;
}

} // namespace llnroute
