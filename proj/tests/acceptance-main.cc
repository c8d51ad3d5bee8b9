// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "llnroute/number-format.h"
#include "llnroute/radio.h"
#include "llnroute/results-io.h"
#include "llnroute/scenario-config.h"
#include "llnroute/sim-engine.h"
#include "llnroute/sweep.h"
#include "llnroute/topology.h"
#include "llnroute/traffic.h"
#include "test-support.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace llnroute;
using namespace llnroute::testing;

namespace
{

using Clock = std::chrono::steady_clock;

int g_failures = 0;
uint64_t g_rrepNonDestination = 0;
std::map<int, std::string> g_lines;

void
Report(int id, bool pass, const std::string& title, const std::string& detail)
{
    if (!pass)
    {
        ++g_failures;
    }
    g_lines[id] = std::string(pass ? "PASS" : "FAIL") + "  " + std::to_string(id) + "  " + title + ": " + detail;
}

std::string
Fixed(double v, int digits = 3)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double
SecondsSince(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

unsigned
Jobs()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

ScenarioConfig
Config(const std::string& text)
{
    std::istringstream in(text);
    return ParseConfig(in, "acceptance");
}

/// Connected lossless topology of 5-10 nodes on a field small enough for multi-hop paths.
std::vector<Position>
SmallTopology(uint64_t seed)
{
    TopologyRequest req;
    req.nodes = 5 + seed % 6;
    req.field = FieldSize{400.0, 400.0};
    req.seed = seed;
    return GenerateTopology(req);
}

struct WalkStats
{
    uint64_t walks{0};
    uint64_t loops{0};
    uint64_t deadEnds{0};
};

/// Follows next hops from every router toward every destination it holds a valid route to.
void
WalkRoutes(const Engine& engine, WalkStats& stats)
{
    const auto now = engine.Now();
    const auto n = engine.Nodes().size();
    for (const auto& node : engine.Nodes())
    {
        for (const auto& route : node.router->RoutingSnapshot(now))
        {
            if (!route.valid || route.validUntil <= now)
            {
                continue;
            }
            ++stats.walks;
            Address at = node.id;
            std::size_t steps = 0;
            while (at != route.destination)
            {
                const auto r = engine.RouterOf(at).LookupRoute(route.destination, now);
                if (!r)
                {
                    ++stats.deadEnds;
                    break;
                }
                at = r->nextHop;
                if (++steps > n)
                {
                    ++stats.loops;
                    break;
                }
            }
        }
    }
}

void
CriterionOracleRoutes(WalkStats& walks)
{
    const auto start = Clock::now();
    uint64_t checked = 0;
    uint64_t mismatches = 0;
    std::string firstMismatch;
    for (uint64_t seed = 1; seed <= 200; ++seed)
    {
        const auto pos = SmallTopology(seed);
        const auto hops = BfsHops(pos, RadioModel{}.rangeM, 0);
        for (const auto proto : {Protocol::Loadng, Protocol::Aodv})
        {
            for (std::size_t i = 1; i < pos.size(); ++i)
            {
                // Fresh routers for every originator: no state left over from other floods.
                Engine engine(LosslessConfig(proto), pos, seed);
                const Address origin{i + 1};
                engine.ScheduleArrival(TrafficArrival{Seconds(1), origin, engine.Sink(), DataKind::MeterReport, 64});
                const auto report = engine.Run(Seconds(20));
                g_rrepNonDestination += report.rrepNonDestination;
                const auto route = engine.RouterOf(origin).LookupRoute(engine.Sink(), engine.Now());
                ++checked;
                if (!route || route->metric != hops[i])
                {
                    ++mismatches;
                    if (firstMismatch.empty())
                    {
                        firstMismatch = " (first: " + std::string(ToString(proto)) + " seed " + std::to_string(seed) +
                                        " node " + std::to_string(i + 1) + " bfs " + std::to_string(hops[i]) +
                                        " got " + (route ? std::to_string(route->metric) : "none") + ")";
                    }
                }
                WalkRoutes(engine, walks);
            }
        }
    }
    const double elapsed = SecondsSince(start);
    Report(1, mismatches == 0 && elapsed < 10.0, "discovered hop counts equal BFS distances",
           std::to_string(checked - mismatches) + "/" + std::to_string(checked) + " match over 200 topologies, " +
               Fixed(elapsed, 2) + " s" + firstMismatch);
}

void
CriterionLoopFreedom(WalkStats walks)
{
    // Busy lossless networks, inspected before any route can expire.
    for (uint64_t seed = 1; seed <= 20; ++seed)
    {
        TopologyRequest req;
        req.nodes = 25 + seed;
        req.seed = seed;
        const auto pos = GenerateTopology(req);
        for (const auto proto : {Protocol::Loadng, Protocol::Aodv})
        {
            auto cfg = LosslessConfig(proto);
            cfg.traffic.appAckEnabled = true;
            Engine engine(cfg, pos, seed);
            const auto until = ProtocolTimers{}.routeHold - Seconds(10);
            RngStream meters(seed, RngPurpose::MeterTraffic);
            RngStream pushes(seed, RngPurpose::ConfigTraffic);
            TrafficProfile profile = cfg.traffic;
            profile.configMeanInterval = Seconds(5);
            auto arrivals = ScheduleMeterReports(profile, engine.Clients(), engine.Sink(), until, meters);
            const auto cfgPushes = ScheduleConfigPushes(profile, engine.Clients(), engine.Sink(), until, pushes);
            arrivals.insert(arrivals.end(), cfgPushes.begin(), cfgPushes.end());
            std::stable_sort(arrivals.begin(), arrivals.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
            engine.ScheduleTraffic(arrivals);
            const auto report = engine.Run(until);
            g_rrepNonDestination += report.rrepNonDestination;
            WalkRoutes(engine, walks);
        }
    }
    Report(3, walks.loops == 0 && walks.deadEnds == 0 && walks.walks > 0, "next-hop walks reach the destination",
           std::to_string(walks.walks) + " walks, " + std::to_string(walks.loops) + " loops, " +
               std::to_string(walks.deadEnds) + " dead ends");
}

struct Series
{
    std::map<double, SummaryRow> loadng;
    std::map<double, SummaryRow> aodv;
};

Series
Split(const std::vector<ResultRow>& rows)
{
    Series s;
    for (const auto& row : Summarize(rows))
    {
        (row.protocol == Protocol::Loadng ? s.loadng : s.aodv)[row.axisValue] = row;
    }
    return s;
}

void
Tally(const std::vector<ResultRow>& rows)
{
    for (const auto& r : rows)
    {
        g_rrepNonDestination += r.metrics.rrepNonDestination;
    }
}

std::string
Axis(double v)
{
    return FormatDouble(v);
}

void
CriteriaNodeSweep(const std::vector<ResultRow>& rows)
{
    const auto s = Split(rows);

    bool pdrOk = true;
    std::string pdr;
    for (const auto& [x, l] : s.loadng)
    {
        const auto& a = s.aodv.at(x);
        pdrOk = pdrOk && l.mp2pPdr.mean > a.mp2pPdr.mean;
        pdr += " n=" + Axis(x) + " " + Fixed(l.mp2pPdr.mean) + " vs " + Fixed(a.mp2pPdr.mean) + ";";
    }
    const double gap75 = s.loadng.at(75).mp2pPdr.mean - s.aodv.at(75).mp2pPdr.mean;
    pdrOk = pdrOk && gap75 >= 0.05;
    Report(4, pdrOk, "MP2P PDR LOADng > AODV, gap >= 5 pp at 75 nodes",
           "loadng vs aodv" + pdr + " gap at 75 = " + Fixed(100 * gap75, 1) + " pp");

    bool delayOk = true;
    std::string delay;
    for (const auto& [x, l] : s.loadng)
    {
        const auto& a = s.aodv.at(x);
        delayOk = delayOk && l.mp2pDelayMs.mean < a.mp2pDelayMs.mean && l.p2mpDelayMs.mean < a.p2mpDelayMs.mean;
        delay += " n=" + Axis(x) + " mp2p " + Fixed(l.mp2pDelayMs.mean, 0) + " vs " + Fixed(a.mp2pDelayMs.mean, 0) +
                 " ms, p2mp " + Fixed(l.p2mpDelayMs.mean, 0) + " vs " + Fixed(a.p2mpDelayMs.mean, 0) + " ms;";
    }
    Report(5, delayOk, "end-to-end delay LOADng < AODV in both directions", "loadng vs aodv" + delay);

    bool ctlOk = true;
    std::string ctl;
    for (const auto& [x, l] : s.loadng)
    {
        const auto& a = s.aodv.at(x);
        const double ratio = l.ctlBytesPerSecond.mean / a.ctlBytesPerSecond.mean;
        ctlOk = ctlOk && ratio < 0.9;
        ctl += " n=" + Axis(x) + " " + Fixed(l.ctlBytesPerSecond.mean, 1) + " vs " +
               Fixed(a.ctlBytesPerSecond.mean, 1) + " B/s (ratio " + Fixed(ratio, 2) + ");";
    }
    Report(6, ctlOk, "control bytes/s LOADng < 0.9 x AODV", "loadng vs aodv" + ctl);
}

void
CriterionNearProbe(const std::vector<std::vector<ResultRow>>& perNodeCount, const std::vector<int>& nodeCounts)
{
    bool ok = true;
    double worst = 1.0;
    std::string worstCell;
    for (std::size_t k = 0; k < perNodeCount.size(); ++k)
    {
        for (const auto& row : Summarize(perNodeCount[k]))
        {
            if (row.p2mpPdr.mean < worst)
            {
                worst = row.p2mpPdr.mean;
                worstCell = std::string(ToString(row.protocol)) + " n=" + std::to_string(nodeCounts[k]) +
                            " d=" + Axis(row.axisValue);
            }
            ok = ok && row.p2mpPdr.mean >= 0.95;
        }
    }
    Report(7, ok, "P2MP PDR >= 0.95 with the probe within 150 m",
           "lowest cell mean " + Fixed(worst) + " (" + worstCell + ")");
}

void
CriterionDistance(const std::vector<ResultRow>& rows)
{
    const auto s = Split(rows);
    const double near = s.loadng.at(100).mp2pPdr.mean;
    const double far = s.loadng.at(250).mp2pPdr.mean;
    bool ok = far < near;
    std::string detail = "loadng PDR(250) " + Fixed(far) + " vs PDR(100) " + Fixed(near) + "; loadng vs aodv";
    for (const auto& [x, l] : s.loadng)
    {
        const auto& a = s.aodv.at(x);
        ok = ok && l.mp2pPdr.mean >= a.mp2pPdr.mean;
        detail += " d=" + Axis(x) + " " + Fixed(l.mp2pPdr.mean) + " vs " + Fixed(a.mp2pPdr.mean) + ";";
    }
    Report(8, ok, "PDR falls beyond 150 m and LOADng >= AODV at every distance", detail);
}

void
CriterionRadio()
{
    const std::vector<Position> pos{{0, 0}, {75, 0}};
    Engine engine(EngineConfig{}, pos, 1);
    ControlMessage ack;
    ack.kind = MessageKind::LoadngRrepAck;
    ack.originator = Address{1};
    ack.destination = Address{1};
    for (int i = 0; i < 10000; ++i)
    {
        engine.Transmit(Address{2}, ack, Address{1});
    }
    const auto& mac = engine.Mac();
    const double rate =
        static_cast<double>(mac.unicastAttemptSuccesses) / static_cast<double>(mac.unicastAttempts);
    Report(10, std::abs(rate - 0.75) <= 0.02, "unicast success at 75 m is 0.75 +- 0.02",
           Fixed(rate, 4) + " over " + std::to_string(mac.unicastAttempts) + " attempts");
}

} // namespace

int
main()
{
    const auto start = Clock::now();
    double sweepSeconds = 0.0;
    try
    {
        WalkStats walks;
        CriterionOracleRoutes(walks);

        const auto nodeCfg = Config("protocol = loadng, aodv\nduration_s = 900\nsweep.axis = nodes\n"
                                    "sweep.values = 25, 50, 75\n");
        const auto sweepStart = Clock::now();
        const auto nodeRows = RunSweep(nodeCfg, Jobs());
        sweepSeconds = SecondsSince(sweepStart);
        Tally(nodeRows);

        const std::vector<int> nearCounts{25, 50, 75};
        std::vector<ScenarioConfig> nearCfgs;
        std::vector<std::vector<ResultRow>> nearRows;
        for (const int n : nearCounts)
        {
            nearCfgs.push_back(Config("protocol = loadng, aodv\nduration_s = 900\nnodes = " + std::to_string(n) +
                                      "\nsweep.axis = distance\nsweep.values = 50, 100, 150\n"));
            nearRows.push_back(RunSweep(nearCfgs.back(), Jobs()));
            Tally(nearRows.back());
        }

        const auto distCfg = Config("protocol = loadng, aodv\nduration_s = 900\nnodes = 50\n"
                                    "sweep.axis = distance\nsweep.values = 50, 100, 150, 200, 250\n");
        const auto distRows = RunSweep(distCfg, Jobs());
        Tally(distRows);

        CriterionLoopFreedom(walks);
        Report(2, g_rrepNonDestination == 0, "no LOADng RREP generated away from the destination",
               std::to_string(g_rrepNonDestination) + " across all acceptance runs");
        CriteriaNodeSweep(nodeRows);
        CriterionNearProbe(nearRows, nearCounts);
        CriterionDistance(distRows);

        // Repeat every sweep; a different job count must not change a byte either.
        const unsigned otherJobs = Jobs() == 1 ? 2 : 1;
        bool same = FormatResultsCsv(RunSweep(nodeCfg, otherJobs)) == FormatResultsCsv(nodeRows) &&
                    FormatResultsCsv(RunSweep(distCfg, otherJobs)) == FormatResultsCsv(distRows);
        std::size_t repeated = nodeRows.size() + distRows.size();
        for (std::size_t k = 0; k < nearCfgs.size(); ++k)
        {
            same = same && FormatResultsCsv(RunSweep(nearCfgs[k], otherJobs)) == FormatResultsCsv(nearRows[k]);
            repeated += nearRows[k].size();
        }
        Report(9, same, "repeated runs give byte-identical CSV", std::to_string(repeated) + " runs repeated");

        CriterionRadio();
    }
    catch (const std::exception& e)
    {
        for (const auto& [id, line] : g_lines)
        {
            std::cout << line << '\n';
        }
        std::cout << "FAIL  acceptance aborted: " << e.what() << std::endl;
        return 2;
    }
    for (const auto& [id, line] : g_lines)
    {
        std::cout << line << '\n';
    }
    std::cout << "node sweep (criteria 4-6): 60 runs of 900 s in " << Fixed(sweepSeconds, 1) << " s\n";
    std::cout << (g_failures == 0 ? "all criteria pass" : std::to_string(g_failures) + " criteria fail") << " ("
              << Fixed(SecondsSince(start), 1) << " s)" << std::endl;
    return g_failures == 0 ? 0 : 1;
}
