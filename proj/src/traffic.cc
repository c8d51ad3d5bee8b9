#include "llnroute/traffic.h"

#include <algorithm>
#include <stdexcept>

namespace llnroute
{

std::vector<TrafficArrival>
ScheduleMeterReports(const TrafficProfile& profile,
                     std::span<const Address> clients,
                     Address sink,
                     SimTime duration,
                     RngStream& rng)
{
    if (clients.empty())
    {
        throw std::invalid_argument("meter reports need at least one client");
    }
    if (profile.meterPeriod <= SimTime{0})
    {
        throw std::invalid_argument("meter period must be positive");
    }
    std::vector<TrafficArrival> out;
    for (const auto client : clients)
    {
        const auto first = rng.UniformTime(SimTime{0}, profile.meterPeriod - SimTime{1});
        for (auto t = first; t < duration; t += profile.meterPeriod)
        {
            out.push_back(TrafficArrival{t, client, sink, DataKind::MeterReport, profile.meterPayload});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
    return out;
}

std::vector<TrafficArrival>
ScheduleConfigPushes(const TrafficProfile& profile,
                     std::span<const Address> clients,
                     Address sink,
                     SimTime duration,
                     RngStream& rng)
{
    if (clients.empty())
    {
        throw std::invalid_argument("config pushes need at least one client");
    }
    if (profile.configMeanInterval <= SimTime{0})
    {
        throw std::invalid_argument("config mean interval must be positive");
    }
    const double meanUs = static_cast<double>(profile.configMeanInterval.count());
    std::vector<TrafficArrival> out;
    SimTime t{0};
    while (true)
    {
        t += SimTime{static_cast<int64_t>(rng.Exponential(meanUs))};
        if (t >= duration)
        {
            break;
        }
        const auto target = clients[rng.Below(clients.size())];
        out.push_back(TrafficArrival{t, sink, target, DataKind::Config, profile.configPayload});
    }
    return out;
}

DataPacket
MakeAppAck(const DataPacket& report, uint64_t id, SimTime now, const TrafficProfile& profile)
{
    DataPacket ack;
    ack.id = id;
    ack.src = report.dst;
    ack.dst = report.src;
    ack.payloadSize = profile.appAckPayload;
    ack.createdAt = now;
    ack.kind = DataKind::AppAck;
    return ack;
}

} // namespace llnroute
