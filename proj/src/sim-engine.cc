#include "llnroute/sim-engine.h"

#include "llnroute/aodv-router.h"
#include "llnroute/loadng-router.h"

#include <algorithm>
#include <sstream>
#include <string>

namespace llnroute
{

std::string_view
ToString(Protocol p)
{
    return p == Protocol::Loadng ? "loadng" : "aodv";
}

std::optional<Protocol>
ParseProtocol(std::string_view name)
{
    if (name == "loadng")
    {
        return Protocol::Loadng;
    }
    if (name == "aodv")
    {
        return Protocol::Aodv;
    }
    return std::nullopt;
}

std::unique_ptr<RoutingProtocol>
MakeRouter(Protocol p, Address self, const ProtocolTimers& timers)
{
    if (p == Protocol::Loadng)
    {
        return std::make_unique<loadng::Router>(self, timers);
    }
    return std::make_unique<aodv::Router>(self, timers);
}

std::string_view
ToString(EventKind kind)
{
    switch (kind)
    {
    case EventKind::FrameDelivery:
        return "FrameDelivery";
    case EventKind::TimerFire:
        return "TimerFire";
    case EventKind::TrafficArrival:
        return "TrafficArrival";
    case EventKind::LinkFeedback:
        return "LinkFeedback";
    }
    return "Unknown";
}

void
EventQueue::Push(SimTime at, decltype(SimEvent::payload) payload)
{
    m_heap.push(SimEvent{at, m_nextSeq++, std::move(payload)});
}

SimEvent
EventQueue::Pop()
{
    SimEvent ev = m_heap.top();
    m_heap.pop();
    return ev;
}

Engine::Engine(EngineConfig config, std::span<const Position> positions, uint64_t seed)
    : m_config(std::move(config)),
      m_macRng(seed, RngPurpose::Mac),
      m_metrics(m_config.addressWidth, m_config.probe)
{
    if (positions.empty())
    {
        throw std::invalid_argument("engine needs at least one node");
    }
    for (std::size_t i = 0; i < positions.size(); ++i)
    {
        const Address id{i + 1};
        m_nodes.push_back(NodeState{id, positions[i], m_config.protocol,
                                    MakeRouter(m_config.protocol, id, m_config.timers)});
    }
    m_neighbors.resize(m_nodes.size());
    for (std::size_t i = 0; i < m_nodes.size(); ++i)
    {
        for (std::size_t j = 0; j < m_nodes.size(); ++j)
        {
            const double d = Distance(m_nodes[i].position, m_nodes[j].position);
            if (i != j && d <= m_config.radio.rangeM)
            {
                m_neighbors[i].emplace_back(j, d);
            }
        }
    }
    m_repliesSeen.resize(m_nodes.size());
    m_framesByNode.resize(m_nodes.size());
}

std::vector<Address>
Engine::Clients() const
{
    std::vector<Address> out;
    for (std::size_t i = 1; i < m_nodes.size(); ++i)
    {
        out.push_back(m_nodes[i].id);
    }
    return out;
}

NodeState&
Engine::NodeOf(Address a)
{
    if (a.value == 0 || a.value > m_nodes.size())
    {
        throw SimulationError("no node with address " + std::to_string(a.value));
    }
    return m_nodes[a.value - 1];
}

RoutingProtocol&
Engine::RouterOf(Address a)
{
    return *NodeOf(a).router;
}

const RoutingProtocol&
Engine::RouterOf(Address a) const
{
    return *const_cast<Engine*>(this)->NodeOf(a).router;
}

void
Engine::ScheduleTraffic(std::span<const TrafficArrival> arrivals)
{
    for (const auto& a : arrivals)
    {
        ScheduleArrival(a);
    }
}

uint64_t
Engine::ScheduleArrival(const TrafficArrival& arrival)
{
    DataPacket pkt;
    pkt.id = m_nextPacketId++;
    pkt.src = arrival.src;
    pkt.dst = arrival.dst;
    pkt.payloadSize = arrival.payload;
    pkt.createdAt = arrival.at;
    pkt.kind = arrival.kind;
    m_queue.Push(arrival.at, event::TrafficArrival{pkt});
    return pkt.id;
}

SimTime
Engine::HopDelay()
{
    return m_config.mac.baseDelay + m_macRng.UniformTime(SimTime{0}, m_config.mac.jitter);
}

void
Engine::CountTransmission(std::size_t fromIdx, const Frame& frame)
{
    ++m_framesTx;
    ++m_framesByNode[fromIdx].first;
    if (const auto* msg = std::get_if<ControlMessage>(&frame))
    {
        m_metrics.RecordControlTx(*msg);
    }
}

void
Engine::CountDelivered(std::size_t fromIdx)
{
    ++m_framesRx;
    ++m_framesByNode[fromIdx].second;
}

void
Engine::Transmit(Address from, const Frame& frame, std::optional<Address> to)
{
    const auto fromIdx = NodeOf(from).id.value - 1;
    if (!to)
    {
        ++m_mac.broadcastFrames;
        CountTransmission(fromIdx, frame);
        const auto at = m_now + HopDelay();
        bool heard = false;
        for (const auto& [idx, d] : m_neighbors[fromIdx])
        {
            if (m_macRng.Bernoulli(PRecv(d, m_config.radio)))
            {
                heard = true;
                m_queue.Push(at, event::FrameDelivery{m_nodes[idx].id, from, frame});
            }
        }
        if (heard)
        {
            CountDelivered(fromIdx);
        }
        return;
    }

    ++m_mac.unicastFrames;
    const auto toIdx = NodeOf(*to).id.value - 1;
    const auto& nbrs = m_neighbors[fromIdx];
    auto it = std::find_if(nbrs.begin(), nbrs.end(), [&](const auto& n) { return n.first == toIdx; });
    if (it == nbrs.end())
    {
        ++m_mac.unicastFailures;
        m_queue.Push(m_now, event::LinkFeedback{from, *to, frame, false});
        return;
    }
    const double p = PRecv(it->second, m_config.radio);
    SimTime t = m_now;
    for (unsigned attempt = 0; attempt <= m_config.mac.retries; ++attempt)
    {
        if (attempt > 0)
        {
            t += m_macRng.UniformTime(SimTime{0}, m_config.mac.backoff);
        }
        t += HopDelay();
        ++m_mac.unicastAttempts;
        CountTransmission(fromIdx, frame);
        if (m_macRng.Bernoulli(p))
        {
            ++m_mac.unicastAttemptSuccesses;
            CountDelivered(fromIdx);
            m_queue.Push(t, event::FrameDelivery{*to, from, frame});
            return;
        }
    }
    ++m_mac.unicastFailures;
    m_queue.Push(t, event::LinkFeedback{from, *to, frame, false});
}

void
Engine::AuditReply(Address sender, const ControlMessage& msg)
{
    if (msg.kind != MessageKind::LoadngRrep)
    {
        return;
    }
    if (RouterOf(sender).OwnsAddress(msg.originator))
    {
        return;
    }
    const auto& seen = m_repliesSeen[sender.value - 1];
    if (!seen.contains({msg.originator.value, msg.seq.Value()}))
    {
        ++m_rrepNonDestination;
    }
}

void
Engine::Apply(Address node, RouterActions actions)
{
    for (auto& a : actions)
    {
        std::visit(
            [&](auto& act) {
                using T = std::decay_t<decltype(act)>;
                if constexpr (std::is_same_v<T, action::BroadcastControl>)
                {
                    AuditReply(node, act.msg);
                    if (IsRouteRequest(act.msg.kind))
                    {
                        m_rreqLog.emplace_back(m_now, node);
                    }
                    Transmit(node, act.msg, std::nullopt);
                }
                else if constexpr (std::is_same_v<T, action::UnicastControl>)
                {
                    AuditReply(node, act.msg);
                    if (IsRouteRequest(act.msg.kind))
                    {
                        m_rreqLog.emplace_back(m_now, node);
                    }
                    Transmit(node, act.msg, act.to);
                }
                else if constexpr (std::is_same_v<T, action::UnicastData>)
                {
                    Transmit(node, act.pkt, act.to);
                }
                else if constexpr (std::is_same_v<T, action::DeliverData>)
                {
                    if (act.pkt.dst != node)
                    {
                        throw SimulationError("packet " + std::to_string(act.pkt.id) +
                                              " delivered at the wrong node");
                    }
                    m_metrics.RecordDelivered(act.pkt, m_now);
                    if (act.pkt.kind == DataKind::MeterReport && m_config.traffic.appAckEnabled)
                    {
                        auto ack = MakeAppAck(act.pkt, m_nextPacketId++, m_now, m_config.traffic);
                        m_metrics.RecordSent(ack, m_now);
                        Apply(node, RouterOf(node).SendData(ack, m_now));
                    }
                }
                else if constexpr (std::is_same_v<T, action::StartTimer>)
                {
                    m_queue.Push(std::max(act.at, m_now), event::TimerFire{node});
                }
                else if constexpr (std::is_same_v<T, action::DropData>)
                {
                    m_metrics.RecordDrop(act.pkt, act.reason);
                }
            },
            a);
    }
}

void
Engine::Dispatch(SimEvent ev)
{
    std::visit(
        [&](auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, event::TrafficArrival>)
            {
                m_metrics.RecordSent(e.pkt, m_now);
                Apply(e.pkt.src, RouterOf(e.pkt.src).SendData(e.pkt, m_now));
            }
            else if constexpr (std::is_same_v<T, event::FrameDelivery>)
            {
                ++m_mac.receptions;
                if (Distance(NodeOf(e.from).position, NodeOf(e.to).position) > m_config.radio.rangeM)
                {
                    ++m_outOfRange;
                }
                if (const auto* msg = std::get_if<ControlMessage>(&e.frame))
                {
                    if (msg->kind == MessageKind::LoadngRrep)
                    {
                        m_repliesSeen[e.to.value - 1].insert({msg->originator.value, msg->seq.Value()});
                    }
                    Apply(e.to, RouterOf(e.to).ReceiveControl(*msg, e.from, m_now));
                }
                else
                {
                    const auto& pkt = std::get<DataPacket>(e.frame);
                    Apply(e.to, RouterOf(e.to).ReceiveData(pkt, e.from, m_now));
                }
            }
            else if constexpr (std::is_same_v<T, event::TimerFire>)
            {
                Apply(e.node, RouterOf(e.node).Tick(m_now));
            }
            else if constexpr (std::is_same_v<T, event::LinkFeedback>)
            {
                if (e.success)
                {
                    return;
                }
                if (const auto* msg = std::get_if<ControlMessage>(&e.frame))
                {
                    Apply(e.node, RouterOf(e.node).ControlLinkFailed(e.neighbor, *msg, m_now));
                }
                else
                {
                    const auto& pkt = std::get<DataPacket>(e.frame);
                    Apply(e.node, RouterOf(e.node).DataLinkFailed(e.neighbor, pkt, m_now));
                }
            }
        },
        ev.payload);
}

namespace
{

void
DescribeFrame(std::ostream& os, const Frame& frame)
{
    if (const auto* msg = std::get_if<ControlMessage>(&frame))
    {
        os << ToString(msg->kind) << " orig=" << msg->originator << " dst=" << msg->destination
           << " seq=" << msg->seq << " hops=" << unsigned{msg->hopCount};
    }
    else
    {
        const auto& pkt = std::get<DataPacket>(frame);
        os << ToString(pkt.kind) << " id=" << pkt.id << " src=" << pkt.src << " dst=" << pkt.dst;
    }
}

} // namespace

void
Engine::Trace(const SimEvent& ev)
{
    if (!m_trace)
    {
        return;
    }
    auto& os = *m_trace;
    os << ev.at.count() << '\t';
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, event::TrafficArrival>)
            {
                os << e.pkt.src << '\t' << ToString(ev.Kind()) << '\t' << ToString(e.pkt.kind)
                   << " id=" << e.pkt.id << " dst=" << e.pkt.dst;
            }
            else if constexpr (std::is_same_v<T, event::FrameDelivery>)
            {
                os << e.to << '\t' << ToString(ev.Kind()) << '\t' << "from=" << e.from << ' ';
                DescribeFrame(os, e.frame);
            }
            else if constexpr (std::is_same_v<T, event::TimerFire>)
            {
                os << e.node << '\t' << ToString(ev.Kind()) << '\t' << '-';
            }
            else if constexpr (std::is_same_v<T, event::LinkFeedback>)
            {
                os << e.node << '\t' << ToString(ev.Kind()) << '\t'
                   << (e.success ? "ok" : "fail") << " neighbor=" << e.neighbor << ' ';
                DescribeFrame(os, e.frame);
            }
        },
        ev.payload);
    os << '\n';
}

MetricsReport
Engine::Run(SimTime until)
{
    while (!m_queue.Empty() && m_queue.Top().at <= until)
    {
        SimEvent ev = m_queue.Pop();
        if (ev.at < m_now)
        {
            throw SimulationError("event at " + std::to_string(ev.at.count()) +
                                  " us precedes current time " + std::to_string(m_now.count()));
        }
        m_now = ev.at;
        Trace(ev);
        Dispatch(std::move(ev));
    }
    m_now = std::max(m_now, until);

    auto report = m_metrics.Finalize(until);
    for (const auto& n : m_nodes)
    {
        report.routers += n.router->Counters();
    }
    report.rrepNonDestination = m_rrepNonDestination;
    report.framesTransmitted = m_framesTx;
    report.framesDelivered = m_framesRx;
    return report;
}

} // namespace llnroute
