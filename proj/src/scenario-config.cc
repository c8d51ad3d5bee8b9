#include "llnroute/scenario-config.h"

#include "llnroute/number-format.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace llnroute
{

std::string_view
ToString(SweepAxis axis)
{
    return axis == SweepAxis::Nodes ? "nodes" : "distance";
}

ConfigError::ConfigError(std::string source, unsigned line, std::string key, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " +
                         (key.empty() ? std::string{} : "'" + key + "': ") + message),
      m_line(line),
      m_key(std::move(key))
{
}

namespace
{

std::string_view
Trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view>
SplitList(std::string_view s)
{
    std::vector<std::string_view> out;
    while (true)
    {
        const auto comma = s.find(',');
        out.push_back(Trim(s.substr(0, comma)));
        if (comma == std::string_view::npos)
        {
            break;
        }
        s.remove_prefix(comma + 1);
    }
    return out;
}

/// Thrown by value parsers; the caller attaches source, line and key.
struct ValueError
{
    std::string message;
};

double
NumberIn(std::string_view v, double lo, double hi, bool loInclusive, std::string_view rangeText)
{
    auto d = ParseDouble(v);
    if (!d || std::isnan(*d))
    {
        throw ValueError{"expected a number, got '" + std::string(v) + "'"};
    }
    const bool aboveLo = loInclusive ? *d >= lo : *d > lo;
    if (!aboveLo || *d > hi)
    {
        throw ValueError{"value " + std::string(v) + " out of range (" + std::string(rangeText) + ")"};
    }
    return *d;
}

double
Positive(std::string_view v)
{
    return NumberIn(v, 0.0, 1e12, false, "must be > 0");
}

double
NonNegative(std::string_view v)
{
    return NumberIn(v, 0.0, 1e12, true, "must be >= 0");
}

uint64_t
Integer(std::string_view v, uint64_t lo, uint64_t hi)
{
    auto n = ParseUnsigned(v);
    if (!n)
    {
        throw ValueError{"expected a non-negative integer, got '" + std::string(v) + "'"};
    }
    if (*n < lo || *n > hi)
    {
        throw ValueError{"value " + std::string(v) + " out of range [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]"};
    }
    return *n;
}

bool
Boolean(std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes")
    {
        return true;
    }
    if (v == "false" || v == "0" || v == "no")
    {
        return false;
    }
    throw ValueError{"expected true or false, got '" + std::string(v) + "'"};
}

SimTime
SecondsValue(std::string_view v, bool allowZero = false)
{
    return Seconds(allowZero ? NonNegative(v) : Positive(v));
}

SimTime
MillisValue(std::string_view v, bool allowZero)
{
    return MilliSeconds(allowZero ? NonNegative(v) : Positive(v));
}

std::string
SecondsText(SimTime t)
{
    return FormatDouble(ToSeconds(t));
}

std::string
MillisText(SimTime t)
{
    return FormatDouble(ToMilliSeconds(t));
}

std::string
BoolText(bool b)
{
    return b ? "true" : "false";
}

template <typename T>
std::string
JoinList(const std::vector<T>& items, const std::function<std::string(const T&)>& fmt)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
    {
        out += (i ? ", " : "") + fmt(items[i]);
    }
    return out;
}

struct KeySpec
{
    std::string_view name;
    std::function<void(ScenarioConfig&, std::string_view)> set;
    std::function<std::string(const ScenarioConfig&)> get; ///< empty optional -> skipped in echo
};

const std::vector<KeySpec>&
Keys()
{
    static const std::vector<KeySpec> keys = {
        {"protocol",
         [](ScenarioConfig& c, std::string_view v) {
             c.protocols.clear();
             for (auto item : SplitList(v))
             {
                 auto p = ParseProtocol(item);
                 if (!p)
                 {
                     throw ValueError{"unknown protocol '" + std::string(item) + "' (loadng, aodv)"};
                 }
                 if (std::find(c.protocols.begin(), c.protocols.end(), *p) != c.protocols.end())
                 {
                     throw ValueError{"protocol '" + std::string(item) + "' listed twice"};
                 }
                 c.protocols.push_back(*p);
             }
         },
         [](const ScenarioConfig& c) {
             return JoinList<Protocol>(c.protocols, [](const Protocol& p) { return std::string(ToString(p)); });
         }},
        {"nodes",
         [](ScenarioConfig& c, std::string_view v) { c.nodes = Integer(v, 2, 100000); },
         [](const ScenarioConfig& c) { return std::to_string(c.nodes); }},
        {"duration_s",
         [](ScenarioConfig& c, std::string_view v) { c.durationS = Positive(v); },
         [](const ScenarioConfig& c) { return FormatDouble(c.durationS); }},
        {"seeds",
         [](ScenarioConfig& c, std::string_view v) {
             c.seeds.clear();
             for (auto item : SplitList(v))
             {
                 c.seeds.push_back(Integer(item, 0, UINT64_MAX));
             }
         },
         [](const ScenarioConfig& c) {
             return JoinList<uint64_t>(c.seeds, [](const uint64_t& s) { return std::to_string(s); });
         }},
        {"field.width_m",
         [](ScenarioConfig& c, std::string_view v) { c.field.widthM = Positive(v); },
         [](const ScenarioConfig& c) { return FormatDouble(c.field.widthM); }},
        {"field.height_m",
         [](ScenarioConfig& c, std::string_view v) { c.field.heightM = Positive(v); },
         [](const ScenarioConfig& c) { return FormatDouble(c.field.heightM); }},
        {"radio.range_m",
         [](ScenarioConfig& c, std::string_view v) { c.radio.rangeM = Positive(v); },
         [](const ScenarioConfig& c) { return FormatDouble(c.radio.rangeM); }},
        {"radio.alpha",
         [](ScenarioConfig& c, std::string_view v) { c.radio.alpha = Positive(v); },
         [](const ScenarioConfig& c) { return FormatDouble(c.radio.alpha); }},
        {"radio.base_success",
         [](ScenarioConfig& c, std::string_view v) {
             c.radio.baseSuccess = NumberIn(v, 0.0, 1.0, true, "must be in [0, 1]");
         },
         [](const ScenarioConfig& c) { return FormatDouble(c.radio.baseSuccess); }},
        {"radio.distance_loss",
         [](ScenarioConfig& c, std::string_view v) { c.radio.distanceLoss = Boolean(v); },
         [](const ScenarioConfig& c) { return BoolText(c.radio.distanceLoss); }},
        {"mac.base_delay_ms",
         [](ScenarioConfig& c, std::string_view v) { c.mac.baseDelay = MillisValue(v, false); },
         [](const ScenarioConfig& c) { return MillisText(c.mac.baseDelay); }},
        {"mac.jitter_ms",
         [](ScenarioConfig& c, std::string_view v) { c.mac.jitter = MillisValue(v, true); },
         [](const ScenarioConfig& c) { return MillisText(c.mac.jitter); }},
        {"mac.retries",
         [](ScenarioConfig& c, std::string_view v) { c.mac.retries = static_cast<unsigned>(Integer(v, 0, 15)); },
         [](const ScenarioConfig& c) { return std::to_string(c.mac.retries); }},
        {"mac.backoff_ms",
         [](ScenarioConfig& c, std::string_view v) { c.mac.backoff = MillisValue(v, true); },
         [](const ScenarioConfig& c) { return MillisText(c.mac.backoff); }},
        {"traffic.meter_period_s",
         [](ScenarioConfig& c, std::string_view v) { c.traffic.meterPeriod = SecondsValue(v); },
         [](const ScenarioConfig& c) { return SecondsText(c.traffic.meterPeriod); }},
        {"traffic.meter_payload",
         [](ScenarioConfig& c, std::string_view v) {
             c.traffic.meterPayload = static_cast<uint32_t>(Integer(v, 1, 65535));
         },
         [](const ScenarioConfig& c) { return std::to_string(c.traffic.meterPayload); }},
        {"traffic.app_ack",
         [](ScenarioConfig& c, std::string_view v) { c.traffic.appAckEnabled = Boolean(v); },
         [](const ScenarioConfig& c) { return BoolText(c.traffic.appAckEnabled); }},
        {"traffic.app_ack_payload",
         [](ScenarioConfig& c, std::string_view v) {
             c.traffic.appAckPayload = static_cast<uint32_t>(Integer(v, 1, 65535));
         },
         [](const ScenarioConfig& c) { return std::to_string(c.traffic.appAckPayload); }},
        {"traffic.config_mean_interval_s",
         [](ScenarioConfig& c, std::string_view v) { c.traffic.configMeanInterval = SecondsValue(v); },
         [](const ScenarioConfig& c) { return SecondsText(c.traffic.configMeanInterval); }},
        {"traffic.config_payload",
         [](ScenarioConfig& c, std::string_view v) {
             c.traffic.configPayload = static_cast<uint32_t>(Integer(v, 1, 65535));
         },
         [](const ScenarioConfig& c) { return std::to_string(c.traffic.configPayload); }},
        {"timers.route_hold_s",
         [](ScenarioConfig& c, std::string_view v) { c.timers.routeHold = SecondsValue(v); },
         [](const ScenarioConfig& c) { return SecondsText(c.timers.routeHold); }},
        {"timers.blacklist_s",
         [](ScenarioConfig& c, std::string_view v) { c.timers.blacklistTime = SecondsValue(v, true); },
         [](const ScenarioConfig& c) { return SecondsText(c.timers.blacklistTime); }},
        {"timers.rrep_ack_timeout_s",
         [](ScenarioConfig& c, std::string_view v) { c.timers.rrepAckTimeout = SecondsValue(v); },
         [](const ScenarioConfig& c) { return SecondsText(c.timers.rrepAckTimeout); }},
        {"timers.rreq_retries",
         [](ScenarioConfig& c, std::string_view v) { c.timers.rreqRetries = static_cast<unsigned>(Integer(v, 0, 16)); },
         [](const ScenarioConfig& c) { return std::to_string(c.timers.rreqRetries); }},
        {"timers.rreq_backoff_s",
         [](ScenarioConfig& c, std::string_view v) { c.timers.rreqBackoff = SecondsValue(v); },
         [](const ScenarioConfig& c) { return SecondsText(c.timers.rreqBackoff); }},
        {"timers.hop_limit",
         [](ScenarioConfig& c, std::string_view v) { c.timers.hopLimit = static_cast<uint8_t>(Integer(v, 1, 255)); },
         [](const ScenarioConfig& c) { return std::to_string(c.timers.hopLimit); }},
        {"timers.buffer_cap",
         [](ScenarioConfig& c, std::string_view v) { c.timers.bufferCap = Integer(v, 1, 1 << 20); },
         [](const ScenarioConfig& c) { return std::to_string(c.timers.bufferCap); }},
        {"timers.rreq_dedup_s",
         [](ScenarioConfig& c, std::string_view v) { c.timers.rreqDedupHold = SecondsValue(v); },
         [](const ScenarioConfig& c) { return SecondsText(c.timers.rreqDedupHold); }},
        {"wire.address_width",
         [](ScenarioConfig& c, std::string_view v) {
             c.addressWidth = static_cast<unsigned>(Integer(v, 1, kMaxAddressWidth));
         },
         [](const ScenarioConfig& c) { return std::to_string(c.addressWidth); }},
        {"scenario.distance_m",
         [](ScenarioConfig& c, std::string_view v) { c.distanceM = NonNegative(v); },
         [](const ScenarioConfig& c) { return c.distanceM ? FormatDouble(*c.distanceM) : std::string{}; }},
        {"sweep.axis",
         [](ScenarioConfig& c, std::string_view v) {
             if (!c.sweep)
             {
                 c.sweep.emplace();
             }
             if (v == "nodes")
             {
                 c.sweep->axis = SweepAxis::Nodes;
             }
             else if (v == "distance")
             {
                 c.sweep->axis = SweepAxis::Distance;
             }
             else
             {
                 throw ValueError{"expected nodes or distance, got '" + std::string(v) + "'"};
             }
         },
         [](const ScenarioConfig& c) { return c.sweep ? std::string(ToString(c.sweep->axis)) : std::string{}; }},
        {"sweep.values",
         [](ScenarioConfig& c, std::string_view v) {
             if (!c.sweep)
             {
                 c.sweep.emplace();
             }
             c.sweep->values.clear();
             for (auto item : SplitList(v))
             {
                 c.sweep->values.push_back(NonNegative(item));
             }
         },
         [](const ScenarioConfig& c) {
             return c.sweep ? JoinList<double>(c.sweep->values, [](const double& d) { return FormatDouble(d); })
                            : std::string{};
         }},
    };
    return keys;
}

std::vector<uint64_t>
DefaultSeeds(bool sweep)
{
    std::vector<uint64_t> seeds{1};
    if (sweep)
    {
        seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    }
    return seeds;
}

} // namespace

ScenarioConfig
ParseConfig(std::istream& in, const std::string& sourceName)
{
    ScenarioConfig config;
    std::map<std::string, unsigned, std::less<>> seen;
    std::string raw;
    unsigned lineNo = 0;
    while (std::getline(in, raw))
    {
        ++lineNo;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
        {
            line = line.substr(0, hash);
        }
        line = Trim(line);
        if (line.empty())
        {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
        {
            throw ConfigError(sourceName, lineNo, "", "expected 'key = value'");
        }
        const auto key = Trim(line.substr(0, eq));
        const auto value = Trim(line.substr(eq + 1));
        const auto& keys = Keys();
        auto spec = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
        if (spec == keys.end())
        {
            throw ConfigError(sourceName, lineNo, std::string(key), "unknown key");
        }
        if (auto prior = seen.find(key); prior != seen.end())
        {
            throw ConfigError(sourceName, lineNo, std::string(key),
                              "duplicated key (first set on line " + std::to_string(prior->second) + ")");
        }
        seen.emplace(std::string(key), lineNo);
        if (value.empty())
        {
            throw ConfigError(sourceName, lineNo, std::string(key), "missing value");
        }
        try
        {
            spec->set(config, value);
        }
        catch (const ValueError& e)
        {
            throw ConfigError(sourceName, lineNo, std::string(key), e.message);
        }
    }

    if (config.protocols.empty())
    {
        throw ConfigError(sourceName, lineNo, "protocol", "missing required key");
    }
    if (config.sweep)
    {
        const auto lineOf = [&](std::string_view k) {
            auto it = seen.find(k);
            return it == seen.end() ? lineNo : it->second;
        };
        if (!seen.contains("sweep.axis") || !seen.contains("sweep.values"))
        {
            throw ConfigError(sourceName, lineOf("sweep.axis"), "sweep",
                              "sweep.axis and sweep.values must be set together");
        }
        if (config.sweep->axis == SweepAxis::Nodes)
        {
            for (double v : config.sweep->values)
            {
                if (v < 2 || v != std::floor(v))
                {
                    throw ConfigError(sourceName, lineOf("sweep.values"), "sweep.values",
                                      "node counts must be integers >= 2");
                }
            }
        }
    }
    if (!seen.contains("seeds"))
    {
        config.seeds = DefaultSeeds(config.sweep.has_value());
    }
    return config;
}

ScenarioConfig
ParseConfigFile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError(path, 0, "", "cannot open file");
    }
    return ParseConfig(in, path);
}

std::string
ResolvedConfigText(const ScenarioConfig& config)
{
    std::ostringstream os;
    os << "# resolved configuration, schema=1\n";
    for (const auto& k : Keys())
    {
        auto v = k.get(config);
        if (!v.empty())
        {
            os << k.name << " = " << v << '\n';
        }
    }
    return os.str();
}

void
ApplySeedOverride(ScenarioConfig& config, std::string_view seeds)
{
    std::vector<uint64_t> parsed;
    for (auto item : SplitList(seeds))
    {
        auto s = ParseUnsigned(item);
        if (!s)
        {
            throw ConfigError("LLNROUTE_SEED", 0, "seeds", "expected integers, got '" + std::string(seeds) + "'");
        }
        parsed.push_back(*s);
    }
    config.seeds = std::move(parsed);
}

} // namespace llnroute
