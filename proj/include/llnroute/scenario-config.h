#pragma once

#include "llnroute/radio.h"
#include "llnroute/router.h"
#include "llnroute/sim-engine.h"
#include "llnroute/topology.h"
#include "llnroute/traffic.h"

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace llnroute
{

enum class SweepAxis : uint8_t
{
    Nodes,
    Distance,
};

std::string_view ToString(SweepAxis axis);

struct SweepSpec
{
    SweepAxis axis{SweepAxis::Nodes};
    std::vector<double> values;

    friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// Experiment input. Defaults follow the reference AMI deployment.
struct ScenarioConfig
{
    std::vector<Protocol> protocols;
    std::size_t nodes{50};
    FieldSize field;
    RadioModel radio;
    MacModel mac;
    TrafficProfile traffic;
    ProtocolTimers timers;
    unsigned addressWidth{kDefaultAddressWidth};
    double durationS{8 * 3600.0};
    std::vector<uint64_t> seeds;
    /// Probe distance for a single (non-sweep) run.
    std::optional<double> distanceM;
    std::optional<SweepSpec> sweep;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parse or validation failure naming the offending key and line.
class ConfigError : public std::runtime_error
{
  public:
    ConfigError(std::string source, unsigned line, std::string key, const std::string& message);

    unsigned Line() const
    {
        return m_line;
    }
    const std::string& Key() const
    {
        return m_key;
    }

  private:
    unsigned m_line;
    std::string m_key;
};

/**
 * Reads `section.key = value` lines; `#` starts a comment. Unknown and
 * duplicated keys are errors, as is a missing `protocol`.
 */
ScenarioConfig ParseConfig(std::istream& in, const std::string& sourceName = "<config>");
ScenarioConfig ParseConfigFile(const std::string& path);

/// Every key with its resolved value; parsing the text yields the same config.
std::string ResolvedConfigText(const ScenarioConfig& config);

/// Replaces the seed list with a comma-separated override, e.g. from LLNROUTE_SEED.
void ApplySeedOverride(ScenarioConfig& config, std::string_view seeds);

} // namespace llnroute
