#include "llnroute/sweep.h"

#include "llnroute/number-format.h"
#include "llnroute/rng.h"
#include "llnroute/topology.h"
#include "llnroute/traffic.h"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace llnroute
{

namespace
{

uint64_t
TrafficSalt(std::size_t nodes, std::optional<double> distanceM)
{
    return static_cast<uint64_t>(nodes) ^
           (distanceM ? static_cast<uint64_t>(std::llround(*distanceM * 1000)) << 20 : 0);
}

SweepAxis
AxisOf(const ScenarioConfig& config)
{
    if (config.sweep)
    {
        return config.sweep->axis;
    }
    return config.distanceM ? SweepAxis::Distance : SweepAxis::Nodes;
}

double
AxisValueOf(const ScenarioConfig& config, const CellSpec& cell)
{
    return AxisOf(config) == SweepAxis::Distance ? cell.distanceM.value_or(0.0)
                                                 : static_cast<double>(cell.nodes);
}

std::string
Describe(const ScenarioConfig& config, const CellSpec& cell)
{
    return std::string(ToString(cell.protocol)) + " " + std::string(ToString(AxisOf(config))) + "=" +
           FormatDouble(AxisValueOf(config, cell)) + " seed=" + std::to_string(cell.seed);
}

} // namespace

MetricsReport
RunCell(const ScenarioConfig& config, const CellSpec& cell, std::ostream* trace)
{
    TopologyRequest req;
    req.nodes = cell.nodes;
    req.field = config.field;
    req.rangeM = config.radio.rangeM;
    req.distToSink = cell.distanceM;
    req.seed = cell.seed;
    const auto positions = GenerateTopology(req);

    EngineConfig ec;
    ec.protocol = cell.protocol;
    ec.radio = config.radio;
    ec.mac = config.mac;
    ec.timers = config.timers;
    ec.addressWidth = config.addressWidth;
    ec.traffic = config.traffic;
    if (cell.distanceM)
    {
        ec.probe = Address{2};
    }

    Engine engine(ec, positions, cell.seed);
    engine.SetTrace(trace);
    const SimTime duration = Seconds(config.durationS);
    const auto clients = engine.Clients();
    const uint64_t salt = TrafficSalt(cell.nodes, cell.distanceM);
    RngStream meterRng(cell.seed, RngPurpose::MeterTraffic, salt);
    RngStream configRng(cell.seed, RngPurpose::ConfigTraffic, salt);
    auto arrivals = ScheduleMeterReports(config.traffic, clients, engine.Sink(), duration, meterRng);
    const auto pushes = ScheduleConfigPushes(config.traffic, clients, engine.Sink(), duration, configRng);
    arrivals.insert(arrivals.end(), pushes.begin(), pushes.end());
    std::stable_sort(arrivals.begin(), arrivals.end(),
                     [](const TrafficArrival& a, const TrafficArrival& b) { return a.at < b.at; });
    engine.ScheduleTraffic(arrivals);

    auto report = engine.Run(duration);

    const uint64_t sent = report.mp2p.sent + report.p2mp.sent;
    const uint64_t settled = report.mp2p.delivered + report.p2mp.delivered + report.dropsTotal + report.inFlight;
    if (sent != settled)
    {
        throw AccountingError("sent " + std::to_string(sent) + " packets but delivered + dropped + in flight is " +
                              std::to_string(settled));
    }
    return report;
}

std::vector<CellSpec>
ExpandCells(const ScenarioConfig& config)
{
    std::vector<CellSpec> cells;
    std::vector<std::pair<std::size_t, std::optional<double>>> points;
    if (config.sweep)
    {
        for (double v : config.sweep->values)
        {
            if (config.sweep->axis == SweepAxis::Nodes)
            {
                points.emplace_back(static_cast<std::size_t>(v), config.distanceM);
            }
            else
            {
                points.emplace_back(config.nodes, v);
            }
        }
    }
    else
    {
        points.emplace_back(config.nodes, config.distanceM);
    }
    for (auto p : config.protocols)
    {
        for (const auto& [nodes, dist] : points)
        {
            for (auto seed : config.seeds)
            {
                cells.push_back(CellSpec{p, nodes, dist, seed});
            }
        }
    }
    return cells;
}

std::string
TraceFileName(const ResultRow& row)
{
    return "trace-" + std::string(ToString(row.protocol)) + "-" + std::string(ToString(row.axis)) + "-" +
           FormatDouble(row.axisValue) + "-seed" + std::to_string(row.seed) + ".tsv";
}

std::vector<ResultRow>
RunSweep(const ScenarioConfig& config, unsigned jobs, const std::optional<std::filesystem::path>& traceDir)
{
    const auto cells = ExpandCells(config);
    std::vector<ResultRow> rows(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        rows[i].protocol = cells[i].protocol;
        rows[i].axis = AxisOf(config);
        rows[i].axisValue = AxisValueOf(config, cells[i]);
        rows[i].seed = cells[i].seed;
    }

    std::atomic<std::size_t> next{0};
    std::mutex errorMutex;
    std::exception_ptr firstError;
    std::size_t firstErrorIndex = cells.size();

    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++)
        {
            try
            {
                std::ofstream traceOut;
                if (traceDir)
                {
                    const auto path = *traceDir / TraceFileName(rows[i]);
                    traceOut.open(path);
                    if (!traceOut)
                    {
                        throw std::runtime_error("cannot write trace file " + path.string());
                    }
                }
                rows[i].metrics = RunCell(config, cells[i], traceDir ? &traceOut : nullptr);
            }
            catch (const std::exception& e)
            {
                // Keep the lowest failing index so the report is stable across job counts.
                std::lock_guard lock(errorMutex);
                if (i < firstErrorIndex)
                {
                    firstErrorIndex = i;
                    firstError = std::make_exception_ptr(RunAbort(Describe(config, cells[i]) + ": " + e.what()));
                }
            }
        }
    };

    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
    if (jobs == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j)
        {
            pool.emplace_back(worker);
        }
    }
    if (firstError)
    {
        std::rethrow_exception(firstError);
    }

    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.protocol, a.axisValue, a.seed) < std::tie(b.protocol, b.axisValue, b.seed);
    });
    return rows;
}

Estimate
MeanWithCi(const std::vector<double>& samples)
{
    Estimate e;
    if (samples.empty())
    {
        return e;
    }
    const double n = static_cast<double>(samples.size());
    double sum = 0;
    for (double s : samples)
    {
        sum += s;
    }
    e.mean = sum / n;
    if (samples.size() < 2)
    {
        return e;
    }
    double ss = 0;
    for (double s : samples)
    {
        ss += (s - e.mean) * (s - e.mean);
    }
    const double sd = std::sqrt(ss / (n - 1));
    boost::math::students_t dist(n - 1);
    e.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
    return e;
}

std::vector<SummaryRow>
Summarize(const std::vector<ResultRow>& rows)
{
    std::vector<SummaryRow> out;
    std::size_t i = 0;
    while (i < rows.size())
    {
        std::size_t j = i;
        std::vector<double> mp2pPdr, mp2pDelay, p2mpPdr, p2mpDelay, ctl, drops;
        while (j < rows.size() && rows[j].protocol == rows[i].protocol && rows[j].axisValue == rows[i].axisValue)
        {
            const auto& m = rows[j].metrics;
            mp2pPdr.push_back(m.mp2p.pdr);
            mp2pDelay.push_back(m.mp2p.delayMeanMs);
            p2mpPdr.push_back(m.p2mp.pdr);
            p2mpDelay.push_back(m.p2mp.delayMeanMs);
            ctl.push_back(m.ctlBytesPerSecond);
            drops.push_back(static_cast<double>(m.dropsTotal));
            ++j;
        }
        SummaryRow s;
        s.protocol = rows[i].protocol;
        s.axis = rows[i].axis;
        s.axisValue = rows[i].axisValue;
        s.runs = j - i;
        s.mp2pPdr = MeanWithCi(mp2pPdr);
        s.mp2pDelayMs = MeanWithCi(mp2pDelay);
        s.p2mpPdr = MeanWithCi(p2mpPdr);
        s.p2mpDelayMs = MeanWithCi(p2mpDelay);
        s.ctlBytesPerSecond = MeanWithCi(ctl);
        s.dropsTotal = MeanWithCi(drops);
        out.push_back(s);
        i = j;
    }
    return out;
}

} // namespace llnroute
