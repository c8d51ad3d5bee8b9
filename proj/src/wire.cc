#include "llnroute/wire.h"

#include <stdexcept>
#include <string>

namespace llnroute
{

std::ostream&
operator<<(std::ostream& os, Address a)
{
    return os << a.value;
}

std::ostream&
operator<<(std::ostream& os, SequenceNumber s)
{
    return os << s.Value();
}

std::string_view
ToString(MessageKind kind)
{
    switch (kind)
    {
    case MessageKind::LoadngRreq:
        return "LOADNG_RREQ";
    case MessageKind::LoadngRrep:
        return "LOADNG_RREP";
    case MessageKind::LoadngRrepAck:
        return "LOADNG_RREP_ACK";
    case MessageKind::LoadngRerr:
        return "LOADNG_RERR";
    case MessageKind::AodvRreq:
        return "AODV_RREQ";
    case MessageKind::AodvRrep:
        return "AODV_RREP";
    case MessageKind::AodvRerr:
        return "AODV_RERR";
    }
    return "UNKNOWN";
}

std::string_view
ToString(DataKind kind)
{
    switch (kind)
    {
    case DataKind::MeterReport:
        return "METER_REPORT";
    case DataKind::AppAck:
        return "APP_ACK";
    case DataKind::Config:
        return "CONFIG";
    }
    return "UNKNOWN";
}

bool
IsLoadng(MessageKind kind)
{
    return kind == MessageKind::LoadngRreq || kind == MessageKind::LoadngRrep ||
           kind == MessageKind::LoadngRrepAck || kind == MessageKind::LoadngRerr;
}

bool
IsRouteRequest(MessageKind kind)
{
    return kind == MessageKind::LoadngRreq || kind == MessageKind::AodvRreq;
}

bool
IsRouteReply(MessageKind kind)
{
    return kind == MessageKind::LoadngRrep || kind == MessageKind::AodvRrep;
}

bool
IsRouteError(MessageKind kind)
{
    return kind == MessageKind::LoadngRerr || kind == MessageKind::AodvRerr;
}

std::size_t
SizeInOctets(const ControlMessage& msg, unsigned addressWidth)
{
    if (addressWidth < 1 || addressWidth > kMaxAddressWidth)
    {
        throw std::invalid_argument("address width must be in [1, 16], got " +
                                    std::to_string(addressWidth));
    }
    const std::size_t w = addressWidth;
    const std::size_t n = msg.unreachable.size();
    std::size_t fixed = 0;
    switch (msg.kind)
    {
    case MessageKind::LoadngRreq:
    case MessageKind::LoadngRrep:
        fixed = 10 + 2 * w;
        break;
    case MessageKind::LoadngRrepAck:
        fixed = 2 + w;
        break;
    case MessageKind::LoadngRerr:
        fixed = 8 + 2 * w + w * (n > 0 ? n - 1 : 0);
        break;
    case MessageKind::AodvRreq:
        fixed = 16 + 4 * w;
        break;
    case MessageKind::AodvRrep:
        fixed = 12 + 4 * w;
        break;
    case MessageKind::AodvRerr:
        fixed = 4 + (w + 2) * n;
        break;
    }
    std::size_t tlvBytes = 0;
    for (const auto& tlv : msg.tlvs)
    {
        tlvBytes += 2 + tlv.value.size();
    }
    return fixed + tlvBytes;
}

} // namespace llnroute
