#pragma once

#include "llnroute/router.h"
#include "llnroute/wire.h"

#include <array>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace llnroute
{

class AccountingError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

struct DirectionStats
{
    uint64_t sent{0};
    uint64_t delivered{0};
    double pdr{1.0};
    bool noTraffic{true}; ///< sent == 0; pdr is reported as 1.0
    double delayMeanMs{0.0};
    double delayP95Ms{0.0};

    friend bool operator==(const DirectionStats&, const DirectionStats&) = default;
};

struct MetricsReport
{
    DirectionStats mp2p;
    DirectionStats p2mp; ///< acks and config pushes combined
    DirectionStats appAck;
    DirectionStats config;

    std::array<uint64_t, kMessageKindCount> ctlPacketsByKind{};
    uint64_t ctlPackets{0};
    uint64_t ctlBytes{0};
    double ctlBytesPerSecond{0.0};

    std::array<uint64_t, kDropReasonCount> dropsByReason{};
    uint64_t dropsTotal{0};
    uint64_t inFlight{0};

    RouterCounters routers;
    uint64_t rrepNonDestination{0};
    uint64_t framesTransmitted{0};
    uint64_t framesDelivered{0};
    double durationS{0.0};

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/**
 * Per-run data and control accounting. With a probe address set, only data
 * packets sourced at or destined to the probe count toward the data figures;
 * the conservation ledger always covers every packet.
 */
class MetricsCollector
{
  public:
    explicit MetricsCollector(unsigned addressWidth = kDefaultAddressWidth,
                              std::optional<Address> probe = std::nullopt);

    void RecordSent(const DataPacket& pkt, SimTime now);
    /// Throws AccountingError for an id never sent or already finished.
    void RecordDelivered(const DataPacket& pkt, SimTime now);
    void RecordDrop(const DataPacket& pkt, DropReason reason);
    /// One transmission attempt of a control frame.
    void RecordControlTx(const ControlMessage& msg);

    std::size_t InFlight() const
    {
        return m_outstanding.size();
    }

    MetricsReport Finalize(SimTime duration) const;

  private:
    enum Bucket : std::size_t
    {
        Mp2p = 0,
        AppAck = 1,
        Config = 2,
    };

    struct Collector
    {
        uint64_t sent{0};
        uint64_t delivered{0};
        std::vector<int64_t> delaysUs;
    };

    static Bucket BucketOf(DataKind kind);
    bool Counts(const DataPacket& pkt) const;
    static DirectionStats Summarize(const std::vector<const Collector*>& parts);

    unsigned m_addressWidth;
    std::optional<Address> m_probe;
    std::array<Collector, 3> m_buckets;
    std::unordered_map<uint64_t, bool> m_outstanding; ///< id -> counts toward data figures
    std::array<uint64_t, kMessageKindCount> m_ctlPackets{};
    uint64_t m_ctlBytes{0};
    std::array<uint64_t, kDropReasonCount> m_drops{};
    uint64_t m_inFlightCounted{0};
};

} // namespace llnroute
