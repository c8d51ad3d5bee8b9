#pragma once

#include "llnroute/rng.h"
#include "llnroute/wire.h"

#include <span>
#include <vector>

namespace llnroute
{

/// Bidirectional AMI traffic: periodic meter reports up, acks and config pushes down.
struct TrafficProfile
{
    SimTime meterPeriod{Seconds(60)};
    uint32_t meterPayload{512};
    bool appAckEnabled{true};
    uint32_t appAckPayload{32};
    SimTime configMeanInterval{Seconds(600)};
    uint32_t configPayload{64};

    friend bool operator==(const TrafficProfile&, const TrafficProfile&) = default;
};

struct TrafficArrival
{
    SimTime at{0};
    Address src;
    Address dst;
    DataKind kind{DataKind::MeterReport};
    uint32_t payload{1};

    friend bool operator==(const TrafficArrival&, const TrafficArrival&) = default;
};

/**
 * Each client reports to the sink every meterPeriod, starting at a uniform
 * offset in [0, period). Arrivals at or after `duration` are not generated.
 * Throws std::invalid_argument without clients or with a non-positive period.
 */
std::vector<TrafficArrival> ScheduleMeterReports(const TrafficProfile& profile,
                                                 std::span<const Address> clients,
                                                 Address sink,
                                                 SimTime duration,
                                                 RngStream& rng);

/// Poisson config pushes from the sink to uniformly chosen clients.
std::vector<TrafficArrival> ScheduleConfigPushes(const TrafficProfile& profile,
                                                 std::span<const Address> clients,
                                                 Address sink,
                                                 SimTime duration,
                                                 RngStream& rng);

/// The sink's application acknowledgment for a delivered meter report.
DataPacket MakeAppAck(const DataPacket& report, uint64_t id, SimTime now, const TrafficProfile& profile);

} // namespace llnroute
