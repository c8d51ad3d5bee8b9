#pragma once

#include "llnroute/sim-time.h"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

namespace llnroute
{

/**
 * Node identity on the mesh. Value 0 is the unspecified address and is never
 * assigned to a node. The octet width used on air lives in the size model,
 * not in every address.
 */
struct Address
{
    uint64_t value{0};

    constexpr bool IsUnspecified() const
    {
        return value == 0;
    }

    friend constexpr auto operator<=>(const Address&, const Address&) = default;
};

std::ostream& operator<<(std::ostream& os, Address a);

struct AddressHash
{
    std::size_t operator()(Address a) const noexcept
    {
        return std::hash<uint64_t>{}(a.value);
    }
};

/// Circular 16-bit sequence number.
class SequenceNumber
{
  public:
    constexpr SequenceNumber() = default;

    constexpr explicit SequenceNumber(uint16_t v)
        : m_value(v)
    {
    }

    constexpr uint16_t Value() const
    {
        return m_value;
    }

    /// Advances by one, wrapping at 2^16, and returns the new value.
    SequenceNumber& operator++()
    {
        ++m_value;
        return *this;
    }

    friend constexpr bool operator==(SequenceNumber, SequenceNumber) = default;

  private:
    uint16_t m_value{0};
};

/// True iff 0 < (a - b) mod 2^16 < 2^15. The half-range distance is "not newer" both ways.
constexpr bool
SeqNumIsNewer(SequenceNumber a, SequenceNumber b)
{
    const auto diff = static_cast<uint16_t>(a.Value() - b.Value());
    return diff != 0 && diff < 0x8000;
}

std::ostream& operator<<(std::ostream& os, SequenceNumber s);

enum class MessageKind : uint8_t
{
    LoadngRreq,
    LoadngRrep,
    LoadngRrepAck,
    LoadngRerr,
    AodvRreq,
    AodvRrep,
    AodvRerr,
};

inline constexpr std::size_t kMessageKindCount = 7;

std::string_view ToString(MessageKind kind);

struct Tlv
{
    uint8_t type{0};
    std::vector<uint8_t> value; ///< at most 255 octets

    friend bool operator==(const Tlv&, const Tlv&) = default;
};

struct UnreachableDestination
{
    Address address;
    SequenceNumber seq; ///< only meaningful for AODV

    friend bool operator==(const UnreachableDestination&, const UnreachableDestination&) = default;
};

/**
 * Control message for either protocol.
 *
 * Route requests: originator is the node searching, destination the target.
 * Route replies: originator is the node the reply advertises a route to (the
 * RREP generator for LOADng), destination is where the reply travels.
 * RREP-ACK: seq echoes the acknowledged RREP's sequence number.
 * RERR: destination is where the error travels; unreachable lists lost routes.
 */
struct ControlMessage
{
    MessageKind kind{MessageKind::LoadngRreq};
    Address originator;
    Address destination;
    SequenceNumber seq;
    uint8_t hopCount{0};
    uint8_t hopLimit{32};
    uint16_t metric{0};
    std::vector<Tlv> tlvs;
    std::optional<SequenceNumber> aodvDestSeq;
    std::vector<UnreachableDestination> unreachable;

    friend bool operator==(const ControlMessage&, const ControlMessage&) = default;
};

bool IsLoadng(MessageKind kind);
bool IsRouteRequest(MessageKind kind);
bool IsRouteReply(MessageKind kind);
bool IsRouteError(MessageKind kind);

inline constexpr unsigned kDefaultAddressWidth = 2;
inline constexpr unsigned kMaxAddressWidth = 16;

/**
 * On-air size used for overhead accounting. Fixed part per kind at address
 * width W, plus 2 + length octets per TLV:
 *
 *   LOADng RREQ/RREP  10 + 2W        AODV RREQ  16 + 4W
 *   LOADng RREP-ACK    2 + W         AODV RREP  12 + 4W
 *   LOADng RERR        8 + 2W + W(n-1)   AODV RERR  4 + (W+2)n
 *
 * where n is the number of unreachable destinations. Throws
 * std::invalid_argument for a width outside [1, 16].
 */
std::size_t SizeInOctets(const ControlMessage& msg, unsigned addressWidth = kDefaultAddressWidth);

enum class DataKind : uint8_t
{
    MeterReport,
    AppAck,
    Config,
};

std::string_view ToString(DataKind kind);

struct DataPacket
{
    uint64_t id{0};
    Address src;
    Address dst;
    uint32_t payloadSize{1};
    SimTime createdAt{0};
    DataKind kind{DataKind::MeterReport};
    uint8_t hops{0}; ///< forwarding hops taken so far

    friend bool operator==(const DataPacket&, const DataPacket&) = default;
};

} // namespace llnroute
