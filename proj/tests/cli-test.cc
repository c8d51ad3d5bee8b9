#include "llnroute/number-format.h"
#include "llnroute/results-io.h"
#include "llnroute/scenario-config.h"
#include "llnroute/sweep.h"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace llnroute;

namespace
{

ScenarioConfig
Parse(const std::string& text)
{
    std::istringstream in(text);
    return ParseConfig(in, "test.conf");
}

std::vector<std::string>
SplitLines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
    {
        out.push_back(line);
    }
    return out;
}

std::vector<std::string>
SplitFields(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');)
    {
        out.push_back(f);
    }
    return out;
}

/// Small and fast: 12 cells of a two-minute run.
ScenarioConfig
SmallSweep()
{
    return Parse("protocol = loadng, aodv\n"
                 "duration_s = 120\n"
                 "seeds = 1, 2, 3\n"
                 "sweep.axis = nodes\n"
                 "sweep.values = 10, 15\n");
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("a file naming only the protocol resolves to the reference defaults")
    {
        const auto c = Parse("protocol = loadng\n");
        REQUIRE(c.protocols == std::vector<Protocol>{Protocol::Loadng});
        CHECK(c.field.widthM == 1000.0);
        CHECK(c.field.heightM == 1000.0);
        CHECK(c.radio.rangeM == 150.0);
        CHECK(c.radio.alpha == 2.0);
        CHECK(c.durationS == 8 * 3600.0);
        CHECK(c.traffic.meterPeriod == Seconds(60));
        CHECK(c.traffic.meterPayload == 512);
        CHECK(c.traffic.configMeanInterval == Seconds(600));
        CHECK(c.traffic.appAckEnabled);
        CHECK(c.timers == ProtocolTimers{});
        CHECK(c.mac == MacModel{});
        CHECK(c.seeds == std::vector<uint64_t>{1});
        CHECK(!c.sweep);
    }

    TEST_CASE("comments, blanks and spacing are tolerated")
    {
        const auto c = Parse("# scenario\n\n  protocol=aodv   # trailing\nnodes = 75\nradio.range_m=120.5\n");
        CHECK(c.protocols == std::vector<Protocol>{Protocol::Aodv});
        CHECK(c.nodes == 75);
        CHECK(c.radio.rangeM == 120.5);
    }

    TEST_CASE("diagnostics name the key and line")
    {
        SUBCASE("negative loss exponent")
        {
            try
            {
                Parse("protocol = loadng\nradio.alpha = -1\n");
                FAIL("expected ConfigError");
            }
            catch (const ConfigError& e)
            {
                CHECK(e.Key() == "radio.alpha");
                CHECK(e.Line() == 2);
                CHECK(std::string(e.what()).find("test.conf:2") != std::string::npos);
            }
        }
        SUBCASE("duplicated key")
        {
            try
            {
                Parse("protocol = loadng\nnodes = 25\nnodes = 50\n");
                FAIL("expected ConfigError");
            }
            catch (const ConfigError& e)
            {
                CHECK(e.Key() == "nodes");
                CHECK(e.Line() == 3);
            }
        }
        SUBCASE("unknown key")
        {
            try
            {
                Parse("protocol = loadng\nradio.rnage_m = 100\n");
                FAIL("expected ConfigError");
            }
            catch (const ConfigError& e)
            {
                CHECK(e.Key() == "radio.rnage_m");
                CHECK(e.Line() == 2);
            }
        }
        SUBCASE("missing protocol")
        {
            try
            {
                Parse("nodes = 25\n");
                FAIL("expected ConfigError");
            }
            catch (const ConfigError& e)
            {
                CHECK(e.Key() == "protocol");
            }
        }
        SUBCASE("other bad values")
        {
            CHECK_THROWS_AS(Parse("protocol = rpl\n"), ConfigError);
            CHECK_THROWS_AS(Parse("protocol = loadng\nnodes = 1\n"), ConfigError);
            CHECK_THROWS_AS(Parse("protocol = loadng\nnodes = many\n"), ConfigError);
            CHECK_THROWS_AS(Parse("protocol = loadng\nradio.base_success = 1.5\n"), ConfigError);
            CHECK_THROWS_AS(Parse("protocol = loadng\nsweep.axis = nodes\n"), ConfigError);
            CHECK_THROWS_AS(Parse("protocol = loadng\nsweep.axis = hops\nsweep.values = 1\n"), ConfigError);
            CHECK_THROWS_AS(Parse("protocol = loadng\nno equals sign\n"), ConfigError);
            CHECK_THROWS_AS(Parse("protocol = loadng\nnodes =\n"), ConfigError);
        }
    }

    TEST_CASE("resolved text parses back to the same configuration")
    {
        for (const auto* text : {"protocol = loadng\n",
                                 "protocol = aodv, loadng\nnodes = 33\nradio.alpha = 2.5\nscenario.distance_m = 120\n"
                                 "traffic.app_ack = false\nmac.jitter_ms = 3.25\nseeds = 4, 9\n",
                                 "protocol = loadng\nsweep.axis = distance\nsweep.values = 50, 100, 250\n"})
        {
            const auto c = Parse(text);
            const auto resolved = ResolvedConfigText(c);
            CHECK(Parse(resolved) == c);
            CHECK(ResolvedConfigText(Parse(resolved)) == resolved);
        }
    }

    TEST_CASE("seed override replaces the configured seeds")
    {
        auto c = Parse("protocol = loadng\nseeds = 1, 2, 3\n");
        ApplySeedOverride(c, "42");
        CHECK(c.seeds == std::vector<uint64_t>{42});
        ApplySeedOverride(c, "5,6");
        CHECK(c.seeds == std::vector<uint64_t>{5, 6});
        CHECK_THROWS_AS(ApplySeedOverride(c, "x"), ConfigError);
    }

    TEST_CASE("sweeps default to ten seeds")
    {
        const auto c = Parse("protocol = loadng\nsweep.axis = nodes\nsweep.values = 25\n");
        CHECK(c.seeds.size() == 10);
        CHECK(ExpandCells(c).size() == 10);
    }

    TEST_CASE("sweep expands to one row per protocol, axis value and seed")
    {
        const auto c = SmallSweep();
        const auto rows = RunSweep(c, 1);
        REQUIRE(rows.size() == 2 * 2 * 3);
        for (std::size_t i = 1; i < rows.size(); ++i)
        {
            const auto& a = rows[i - 1];
            const auto& b = rows[i];
            const bool ordered = a.protocol != b.protocol ? a.protocol < b.protocol
                                 : a.axisValue != b.axisValue ? a.axisValue < b.axisValue
                                                              : a.seed < b.seed;
            CHECK(ordered);
        }
        const auto summary = Summarize(rows);
        REQUIRE(summary.size() == 4);
        for (const auto& s : summary)
        {
            CHECK(s.runs == 3);
        }
        const auto summaryCsv = SplitLines(FormatSummaryCsv(summary));
        CHECK(summaryCsv.size() == 5);
    }

    TEST_CASE("identical invocations give byte-identical CSV whatever the job count")
    {
        const auto c = SmallSweep();
        const auto once = FormatResultsCsv(RunSweep(c, 1));
        CHECK(FormatResultsCsv(RunSweep(c, 1)) == once);
        CHECK(FormatResultsCsv(RunSweep(c, 3)) == once);
    }

    TEST_CASE("CSV header is frozen and one row gives two lines")
    {
        auto c = Parse("protocol = loadng\nnodes = 10\nduration_s = 60\n");
        const auto rows = RunSweep(c, 1);
        REQUIRE(rows.size() == 1);
        const auto lines = SplitLines(FormatResultsCsv(rows));
        REQUIRE(lines.size() == 2);
        CHECK(lines[0] == kResultsCsvHeader);
        CHECK(SplitFields(lines[1]).size() == SplitFields(lines[0]).size());
    }

    TEST_CASE("JSON and CSV carry the same values")
    {
        const auto rows = RunSweep(SmallSweep(), 2);
        const auto lines = SplitLines(FormatResultsCsv(rows));
        const auto doc = nlohmann::json::parse(FormatResultsJson(rows));
        CHECK(doc.at("schema") == kResultsSchema);
        const auto header = SplitFields(lines[0]);
        REQUIRE(doc.at("rows").size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
        {
            const auto fields = SplitFields(lines[i + 1]);
            const auto& j = doc.at("rows")[i];
            for (std::size_t k = 0; k < header.size(); ++k)
            {
                const auto& name = header[k];
                CAPTURE(name);
                nlohmann::json v;
                if (name.rfind("mp2p_", 0) == 0 || name.rfind("p2mp_", 0) == 0)
                {
                    const auto split = name.find('_');
                    v = j.at(name.substr(0, split)).at(name.substr(split + 1));
                }
                else
                {
                    v = j.at(name);
                }
                if (v.is_string())
                {
                    CHECK(v.get<std::string>() == fields[k]);
                }
                else
                {
                    CHECK(ParseDouble(fields[k]).value() == v.get<double>());
                }
            }
        }
    }

    TEST_CASE("parsing emitted JSON gives back identical rows")
    {
        const auto rows = RunSweep(SmallSweep(), 2);
        CHECK(ParseResultsJson(FormatResultsJson(rows)) == rows);
        CHECK_THROWS_AS(ParseResultsJson("{\"schema\": 2, \"rows\": []}"), ResultsIoError);
        CHECK_THROWS_AS(ParseResultsJson("not json"), ResultsIoError);
    }

    TEST_CASE("unwritable output names the path")
    {
        const std::filesystem::path bad = "/nonexistent-dir/for/sure/results.csv";
        CHECK_THROWS_WITH_AS(WriteTextFile(bad, "x"), doctest::Contains(bad.string().c_str()), ResultsIoError);

        const auto ok = std::filesystem::temp_directory_path() / "llnroute-write-test.txt";
        WriteTextFile(ok, "hello\n");
        std::ifstream in(ok);
        std::string content;
        std::getline(in, content);
        CHECK(content == "hello");
        std::filesystem::remove(ok);
    }

    TEST_CASE("Student-t confidence half-width")
    {
        // t(0.975, 2) = 4.302652729911275; sd of {1, 2, 3} is 1.
        const auto e = MeanWithCi({1.0, 2.0, 3.0});
        CHECK(e.mean == doctest::Approx(2.0));
        CHECK(e.ci95 == doctest::Approx(4.302652729911275 / std::sqrt(3.0)));
        // t(0.975, 9) = 2.262157162740992.
        const auto ten = MeanWithCi({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
        CHECK(ten.ci95 == doctest::Approx(2.262157162740992 * std::sqrt(55.0 / 6.0) / std::sqrt(10.0)));
        CHECK(MeanWithCi({5.0}).ci95 == 0.0);
        CHECK(MeanWithCi({4.0, 4.0, 4.0}).ci95 == 0.0);
    }

    TEST_CASE("a failing cell aborts the sweep and names the cell")
    {
        auto c = Parse("protocol = loadng\nradio.range_m = 0.5\nseeds = 3\nduration_s = 10\nnodes = 5\n");
        CHECK_THROWS_WITH_AS(RunSweep(c, 1), doctest::Contains("seed=3"), RunAbort);
    }

    TEST_CASE("distance runs record the probe distance as the axis value")
    {
        auto c = Parse("protocol = loadng\nnodes = 10\nduration_s = 120\nscenario.distance_m = 100\n");
        const auto rows = RunSweep(c, 1);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].axis == SweepAxis::Distance);
        CHECK(rows[0].axisValue == 100.0);
        // Only the probe's own report and ack flows count.
        CHECK(rows[0].metrics.mp2p.sent <= 2);
    }
}
