#include "llnroute/results-io.h"

#include "llnroute/number-format.h"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace llnroute
{

using nlohmann::json;

namespace
{

void
AppendDirection(std::ostringstream& os, const DirectionStats& d)
{
    os << ',' << d.sent << ',' << d.delivered << ',' << FormatDouble(d.pdr) << ',' << FormatDouble(d.delayMeanMs)
       << ',' << FormatDouble(d.delayP95Ms);
}

json
DirectionToJson(const DirectionStats& d)
{
    return json{{"sent", d.sent},
                {"delivered", d.delivered},
                {"pdr", d.pdr},
                {"no_traffic", d.noTraffic},
                {"delay_mean_ms", d.delayMeanMs},
                {"delay_p95_ms", d.delayP95Ms}};
}

DirectionStats
DirectionFromJson(const json& j)
{
    DirectionStats d;
    d.sent = j.at("sent").get<uint64_t>();
    d.delivered = j.at("delivered").get<uint64_t>();
    d.pdr = j.at("pdr").get<double>();
    d.noTraffic = j.at("no_traffic").get<bool>();
    d.delayMeanMs = j.at("delay_mean_ms").get<double>();
    d.delayP95Ms = j.at("delay_p95_ms").get<double>();
    return d;
}

json
RoutersToJson(const RouterCounters& c)
{
    return json{{"rrep_orphaned", c.rrepOrphaned},
                {"rerr_unroutable", c.rerrUnroutable},
                {"rreq_duplicates", c.rreqDuplicates},
                {"rreq_blacklisted", c.rreqBlacklisted},
                {"discoveries_started", c.discoveriesStarted},
                {"discoveries_failed", c.discoveriesFailed}};
}

RouterCounters
RoutersFromJson(const json& j)
{
    RouterCounters c;
    c.rrepOrphaned = j.at("rrep_orphaned").get<uint64_t>();
    c.rerrUnroutable = j.at("rerr_unroutable").get<uint64_t>();
    c.rreqDuplicates = j.at("rreq_duplicates").get<uint64_t>();
    c.rreqBlacklisted = j.at("rreq_blacklisted").get<uint64_t>();
    c.discoveriesStarted = j.at("discoveries_started").get<uint64_t>();
    c.discoveriesFailed = j.at("discoveries_failed").get<uint64_t>();
    return c;
}

template <typename Enum, std::size_t N>
json
CountsToJson(const std::array<uint64_t, N>& counts)
{
    json j = json::object();
    for (std::size_t i = 0; i < N; ++i)
    {
        j[std::string(ToString(static_cast<Enum>(i)))] = counts[i];
    }
    return j;
}

template <typename Enum, std::size_t N>
std::array<uint64_t, N>
CountsFromJson(const json& j)
{
    std::array<uint64_t, N> counts{};
    for (std::size_t i = 0; i < N; ++i)
    {
        counts[i] = j.at(std::string(ToString(static_cast<Enum>(i)))).template get<uint64_t>();
    }
    return counts;
}

template <typename T>
T
EnumFromName(const std::string& name, std::initializer_list<T> candidates, std::string_view what)
{
    for (auto c : candidates)
    {
        if (ToString(c) == name)
        {
            return c;
        }
    }
    throw ResultsIoError("unknown " + std::string(what) + " '" + name + "'");
}

} // namespace

std::string
FormatResultsCsv(const std::vector<ResultRow>& rows)
{
    std::ostringstream os;
    os << kResultsCsvHeader << '\n';
    for (const auto& r : rows)
    {
        const auto& m = r.metrics;
        os << ToString(r.protocol) << ',' << ToString(r.axis) << ',' << FormatDouble(r.axisValue) << ',' << r.seed;
        AppendDirection(os, m.mp2p);
        AppendDirection(os, m.p2mp);
        os << ',' << m.ctlPackets << ',' << m.ctlBytes << ',' << FormatDouble(m.ctlBytesPerSecond) << ','
           << m.dropsTotal << '\n';
    }
    return os.str();
}

std::string
FormatResultsJson(const std::vector<ResultRow>& rows)
{
    json out;
    out["schema"] = kResultsSchema;
    out["rows"] = json::array();
    for (const auto& r : rows)
    {
        const auto& m = r.metrics;
        out["rows"].push_back(json{
            {"protocol", ToString(r.protocol)},
            {"axis", ToString(r.axis)},
            {"axis_value", r.axisValue},
            {"seed", r.seed},
            {"mp2p", DirectionToJson(m.mp2p)},
            {"p2mp", DirectionToJson(m.p2mp)},
            {"app_ack", DirectionToJson(m.appAck)},
            {"config", DirectionToJson(m.config)},
            {"ctl_packets", m.ctlPackets},
            {"ctl_packets_by_kind", CountsToJson<MessageKind>(m.ctlPacketsByKind)},
            {"ctl_bytes", m.ctlBytes},
            {"ctl_bytes_per_s", m.ctlBytesPerSecond},
            {"drops_total", m.dropsTotal},
            {"drops_by_reason", CountsToJson<DropReason>(m.dropsByReason)},
            {"in_flight", m.inFlight},
            {"routers", RoutersToJson(m.routers)},
            {"rrep_non_destination", m.rrepNonDestination},
            {"frames_transmitted", m.framesTransmitted},
            {"frames_delivered", m.framesDelivered},
            {"duration_s", m.durationS},
        });
    }
    return out.dump(2) + "\n";
}

std::vector<ResultRow>
ParseResultsJson(std::string_view text)
{
    std::vector<ResultRow> rows;
    try
    {
        const auto doc = json::parse(text);
        if (doc.at("schema").get<int>() != kResultsSchema)
        {
            throw ResultsIoError("unsupported results schema " + doc.at("schema").dump());
        }
        for (const auto& j : doc.at("rows"))
        {
            ResultRow r;
            r.protocol = EnumFromName(j.at("protocol").get<std::string>(), {Protocol::Loadng, Protocol::Aodv},
                                      "protocol");
            r.axis = EnumFromName(j.at("axis").get<std::string>(), {SweepAxis::Nodes, SweepAxis::Distance}, "axis");
            r.axisValue = j.at("axis_value").get<double>();
            r.seed = j.at("seed").get<uint64_t>();
            auto& m = r.metrics;
            m.mp2p = DirectionFromJson(j.at("mp2p"));
            m.p2mp = DirectionFromJson(j.at("p2mp"));
            m.appAck = DirectionFromJson(j.at("app_ack"));
            m.config = DirectionFromJson(j.at("config"));
            m.ctlPackets = j.at("ctl_packets").get<uint64_t>();
            m.ctlPacketsByKind = CountsFromJson<MessageKind, kMessageKindCount>(j.at("ctl_packets_by_kind"));
            m.ctlBytes = j.at("ctl_bytes").get<uint64_t>();
            m.ctlBytesPerSecond = j.at("ctl_bytes_per_s").get<double>();
            m.dropsTotal = j.at("drops_total").get<uint64_t>();
            m.dropsByReason = CountsFromJson<DropReason, kDropReasonCount>(j.at("drops_by_reason"));
            m.inFlight = j.at("in_flight").get<uint64_t>();
            m.routers = RoutersFromJson(j.at("routers"));
            m.rrepNonDestination = j.at("rrep_non_destination").get<uint64_t>();
            m.framesTransmitted = j.at("frames_transmitted").get<uint64_t>();
            m.framesDelivered = j.at("frames_delivered").get<uint64_t>();
            m.durationS = j.at("duration_s").get<double>();
            rows.push_back(std::move(r));
        }
    }
    catch (const json::exception& e)
    {
        throw ResultsIoError(std::string("malformed results json: ") + e.what());
    }
    return rows;
}

std::string
FormatSummaryCsv(const std::vector<SummaryRow>& summary)
{
    std::ostringstream os;
    os << "protocol,axis,axis_value,runs,mp2p_pdr_mean,mp2p_pdr_ci95,mp2p_delay_mean_ms,mp2p_delay_ci95_ms,"
          "p2mp_pdr_mean,p2mp_pdr_ci95,p2mp_delay_mean_ms,p2mp_delay_ci95_ms,ctl_bytes_per_s_mean,"
          "ctl_bytes_per_s_ci95,drops_total_mean,drops_total_ci95\n";
    for (const auto& s : summary)
    {
        os << ToString(s.protocol) << ',' << ToString(s.axis) << ',' << FormatDouble(s.axisValue) << ',' << s.runs;
        for (const auto* e :
             {&s.mp2pPdr, &s.mp2pDelayMs, &s.p2mpPdr, &s.p2mpDelayMs, &s.ctlBytesPerSecond, &s.dropsTotal})
        {
            os << ',' << FormatDouble(e->mean) << ',' << FormatDouble(e->ci95);
        }
        os << '\n';
    }
    return os.str();
}

void
WriteTextFile(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw ResultsIoError("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out)
    {
        throw ResultsIoError("write to " + path.string() + " failed");
    }
}

} // namespace llnroute
