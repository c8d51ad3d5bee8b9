// Command-line front end: single runs, sweeps and config validation.

#include "llnroute/results-io.h"
#include "llnroute/scenario-config.h"
#include "llnroute/sweep.h"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace llnroute;

namespace
{

constexpr int kExitConfigError = 2;
constexpr int kExitRunAbort = 3;

struct RunOptions
{
    std::string configPath;
    std::string outDir{"results"};
    unsigned jobs{1};
    bool trace{false};
};

ScenarioConfig
LoadConfig(const std::string& path)
{
    auto config = ParseConfigFile(path);
    if (const char* env = std::getenv("LLNROUTE_SEED"); env && *env)
    {
        ApplySeedOverride(config, env);
    }
    return config;
}

void
PrintSummary(const std::vector<SummaryRow>& summary)
{
    std::cout << "protocol  axis      value  runs  mp2p_pdr  p2mp_pdr  mp2p_ms   p2mp_ms   ctl_B/s\n";
    for (const auto& s : summary)
    {
        std::printf("%-9s %-9s %6.1f %5zu  %8.4f  %8.4f  %8.1f  %8.1f  %8.2f\n",
                    std::string(ToString(s.protocol)).c_str(), std::string(ToString(s.axis)).c_str(), s.axisValue,
                    s.runs, s.mp2pPdr.mean, s.p2mpPdr.mean, s.mp2pDelayMs.mean, s.p2mpDelayMs.mean,
                    s.ctlBytesPerSecond.mean);
    }
}

int
Execute(const RunOptions& opts, bool requireSweep)
{
    ScenarioConfig config;
    try
    {
        config = LoadConfig(opts.configPath);
        if (requireSweep && !config.sweep)
        {
            throw ConfigError(opts.configPath, 0, "sweep", "the sweep command needs sweep.axis and sweep.values");
        }
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }

    try
    {
        const fs::path out = opts.outDir;
        fs::create_directories(out);
        std::optional<fs::path> traceDir;
        if (opts.trace)
        {
            traceDir = out / "traces";
            fs::create_directories(*traceDir);
        }
        WriteTextFile(out / "resolved.conf", ResolvedConfigText(config));
        const auto rows = RunSweep(config, opts.jobs, traceDir);
        const auto summary = Summarize(rows);
        WriteTextFile(out / "results.csv", FormatResultsCsv(rows));
        WriteTextFile(out / "results.json", FormatResultsJson(rows));
        WriteTextFile(out / "summary.csv", FormatSummaryCsv(summary));
        PrintSummary(summary);
        std::cout << rows.size() << " runs written to " << out.string() << '\n';
    }
    catch (const std::exception& e)
    {
        std::cerr << "run aborted: " << e.what() << '\n';
        return kExitRunAbort;
    }
    return 0;
}

void
AddRunOptions(CLI::App* cmd, RunOptions& opts)
{
    cmd->add_option("config", opts.configPath, "scenario configuration file")->required();
    cmd->add_option("--out", opts.outDir, "output directory")->capture_default_str();
    cmd->add_option("--jobs,-j", opts.jobs, "parallel runs")->check(CLI::Range(1u, 1024u))->capture_default_str();
    cmd->add_flag("--trace", opts.trace, "write one event trace per run under OUT/traces");
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"LOADng / AODV mesh routing simulator for metering traffic"};
    app.require_subcommand(1);

    RunOptions runOpts;
    auto* run = app.add_subcommand("run", "run every protocol, axis value and seed in the config");
    AddRunOptions(run, runOpts);

    RunOptions sweepOpts;
    auto* sweep = app.add_subcommand("sweep", "like run, but the config must define a sweep");
    AddRunOptions(sweep, sweepOpts);

    std::string validatePath;
    auto* validate = app.add_subcommand("validate", "parse a config and print it with defaults resolved");
    validate->add_option("config", validatePath, "scenario configuration file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfigError;
    }

    if (*run)
    {
        return Execute(runOpts, false);
    }
    if (*sweep)
    {
        return Execute(sweepOpts, true);
    }
    try
    {
        std::cout << ResolvedConfigText(LoadConfig(validatePath));
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return 0;
}
