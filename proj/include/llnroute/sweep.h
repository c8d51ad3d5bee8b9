#pragma once

#include "llnroute/metrics.h"
#include "llnroute/scenario-config.h"
#include "llnroute/sim-engine.h"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace llnroute
{

/// One (protocol, axis value, seed) cell of an experiment.
struct ResultRow
{
    Protocol protocol{Protocol::Loadng};
    SweepAxis axis{SweepAxis::Nodes};
    double axisValue{0.0};
    uint64_t seed{0};
    MetricsReport metrics;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// A run that failed; the message names the protocol, axis value and seed.
class RunAbort : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct CellSpec
{
    Protocol protocol{Protocol::Loadng};
    std::size_t nodes{2};
    std::optional<double> distanceM;
    uint64_t seed{1};
};

/**
 * Builds the topology, schedules traffic and runs one engine to the end of
 * the configured duration. The topology depends on the seed, node count and
 * distance only, so both protocols see identical placements. Throws
 * AccountingError if sent packets do not balance against deliveries, drops
 * and packets still in flight.
 */
MetricsReport RunCell(const ScenarioConfig& config, const CellSpec& cell, std::ostream* trace = nullptr);

/// Cells for every protocol, axis value and seed; a config without a sweep yields one axis value.
std::vector<CellSpec> ExpandCells(const ScenarioConfig& config);

/**
 * Executes every cell on up to `jobs` threads. Rows come back sorted by
 * (protocol, axis value, seed) whatever the completion order. With a trace
 * directory, each cell writes its own event trace there.
 */
std::vector<ResultRow> RunSweep(const ScenarioConfig& config,
                                unsigned jobs = 1,
                                const std::optional<std::filesystem::path>& traceDir = std::nullopt);

struct Estimate
{
    double mean{0.0};
    /// Student-t 95% half-width over seeds; 0 with fewer than two seeds.
    double ci95{0.0};

    friend bool operator==(const Estimate&, const Estimate&) = default;
};

Estimate MeanWithCi(const std::vector<double>& samples);

struct SummaryRow
{
    Protocol protocol{Protocol::Loadng};
    SweepAxis axis{SweepAxis::Nodes};
    double axisValue{0.0};
    std::size_t runs{0};
    Estimate mp2pPdr;
    Estimate mp2pDelayMs;
    Estimate p2mpPdr;
    Estimate p2mpDelayMs;
    Estimate ctlBytesPerSecond;
    Estimate dropsTotal;
};

/// One line per (protocol, axis value), in row order.
std::vector<SummaryRow> Summarize(const std::vector<ResultRow>& rows);

std::string TraceFileName(const ResultRow& row);

} // namespace llnroute
