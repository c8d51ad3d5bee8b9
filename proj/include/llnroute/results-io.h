#pragma once

#include "llnroute/sweep.h"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace llnroute
{

inline constexpr int kResultsSchema = 1;

inline constexpr std::string_view kResultsCsvHeader =
    "protocol,axis,axis_value,seed,mp2p_sent,mp2p_delivered,mp2p_pdr,mp2p_delay_mean_ms,mp2p_delay_p95_ms,"
    "p2mp_sent,p2mp_delivered,p2mp_pdr,p2mp_delay_mean_ms,p2mp_delay_p95_ms,ctl_packets,ctl_bytes,"
    "ctl_bytes_per_s,drops_total";

class ResultsIoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

std::string FormatResultsCsv(const std::vector<ResultRow>& rows);

/// Full-fidelity record of every row, including per-kind counters; schema-tagged.
std::string FormatResultsJson(const std::vector<ResultRow>& rows);
std::vector<ResultRow> ParseResultsJson(std::string_view text);

std::string FormatSummaryCsv(const std::vector<SummaryRow>& summary);

/// Throws ResultsIoError naming the path when it cannot be written.
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

} // namespace llnroute
