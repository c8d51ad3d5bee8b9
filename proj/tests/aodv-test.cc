#include "llnroute/aodv-router.h"
#include "llnroute/sim-engine.h"
#include "test-support.h"

#include <doctest.h>

#include <map>

using namespace llnroute;
using namespace llnroute::testing;
using aodv::Router;

namespace
{

const Address A{1};
const Address B{2};
const Address C{3};
const Address D{4};

ControlMessage
Rreq(Address orig, Address dest, uint16_t seq, uint8_t hops = 0, std::optional<uint16_t> destSeq = std::nullopt)
{
    ControlMessage m;
    m.kind = MessageKind::AodvRreq;
    m.originator = orig;
    m.destination = dest;
    m.seq = SequenceNumber{seq};
    m.hopCount = hops;
    if (destSeq)
    {
        m.aodvDestSeq = SequenceNumber{*destSeq};
    }
    return m;
}

ControlMessage
Rrep(Address orig, Address dest, uint16_t seq, uint8_t hops = 0)
{
    ControlMessage m;
    m.kind = MessageKind::AodvRrep;
    m.originator = orig;
    m.destination = dest;
    m.seq = SequenceNumber{seq};
    m.hopCount = hops;
    return m;
}

const SimTime t0 = Seconds(10);

} // namespace

TEST_SUITE("aodv")
{
    TEST_CASE("destination replies with an incremented sequence number")
    {
        Router c(C, {});
        const auto out = c.ProcessRreq(Rreq(A, C, 1, 1, 4), B, t0);
        const auto uc = Only<action::UnicastControl>(out);
        REQUIRE(uc.size() == 1);
        CHECK(uc[0].to == B);
        CHECK(uc[0].msg.kind == MessageKind::AodvRrep);
        CHECK(uc[0].msg.originator == C);
        CHECK(uc[0].msg.destination == A);
        CHECK(uc[0].msg.seq == SequenceNumber{5});
        CHECK(c.OwnSeq() == SequenceNumber{5});
    }

    TEST_CASE("destination seq increments from its own value when the request knows none")
    {
        Router c(C, {});
        c.ProcessRreq(Rreq(A, C, 1), B, t0);
        const auto uc = Only<action::UnicastControl>(c.ProcessRreq(Rreq(D, C, 1), B, t0));
        REQUIRE(uc.size() == 1);
        CHECK(uc[0].msg.seq == SequenceNumber{2});
    }

    TEST_CASE("intermediate with a fresh route replies and notifies the destination")
    {
        Router b(B, {});
        b.MutableRoutes().Update(C, C, 1, SequenceNumber{9}, t0 + Seconds(100));
        const auto out = b.ProcessRreq(Rreq(A, C, 3, 0, 9), A, t0);
        CHECK(Only<action::BroadcastControl>(out).empty());
        const auto uc = Only<action::UnicastControl>(out);
        REQUIRE(uc.size() == 2);
        CHECK(uc[0].to == A);
        CHECK(uc[0].msg.originator == C);
        CHECK(uc[0].msg.destination == A);
        CHECK(uc[0].msg.seq == SequenceNumber{9});
        CHECK(uc[0].msg.hopCount == 1);
        CHECK(uc[1].to == C);
        CHECK(uc[1].msg.kind == MessageKind::AodvRrep);
        CHECK(uc[1].msg.originator == A);
        CHECK(uc[1].msg.destination == C);
        CHECK(uc[1].msg.hopCount == 1);
        CHECK(b.Routes().Find(C)->precursors.contains(A));
        CHECK(b.Routes().Find(A)->precursors.contains(C));
    }

    TEST_CASE("stale cached route: the request is rebroadcast")
    {
        Router b(B, {});
        b.MutableRoutes().Update(C, C, 1, SequenceNumber{3}, t0 + Seconds(100));
        const auto out = b.ProcessRreq(Rreq(A, C, 1, 0, 7), A, t0);
        CHECK(Only<action::UnicastControl>(out).empty());
        const auto bc = Only<action::BroadcastControl>(out);
        REQUIRE(bc.size() == 1);
        CHECK(bc[0].msg.hopCount == 1);
        CHECK(bc[0].msg.aodvDestSeq == SequenceNumber{7});
    }

    TEST_CASE("reply forwarding records the downstream neighbor as precursor")
    {
        // Line A - B - C: after discovery B lists A as a precursor of its route to C.
        Router b(B, {});
        b.ProcessRreq(Rreq(A, C, 1), A, t0);
        const auto out = b.ProcessRrep(Rrep(C, A, 1), C, t0);
        const auto uc = Only<action::UnicastControl>(out);
        REQUIRE(uc.size() == 1);
        CHECK(uc[0].to == A);
        CHECK(uc[0].msg.hopCount == 1);
        CHECK(b.Routes().Find(C)->precursors == std::set<Address>{A});
        CHECK(b.Routes().Find(A)->precursors == std::set<Address>{C});
    }

    TEST_CASE("no acknowledgment is ever sent for a reply")
    {
        Router b(B, {});
        b.ProcessRreq(Rreq(A, C, 1), A, t0);
        for (const auto& u : Only<action::UnicastControl>(b.ProcessRrep(Rrep(C, A, 1), C, t0)))
        {
            CHECK(u.msg.kind == MessageKind::AodvRrep);
        }
    }

    TEST_CASE("originator flushes buffered data")
    {
        Router a(A, {});
        a.SendData(MakePacket(1, A, C), t0);
        const auto data = Only<action::UnicastData>(a.ProcessRrep(Rrep(C, A, 1, 1), B, t0));
        REQUIRE(data.size() == 1);
        CHECK(data[0].to == B);
        CHECK(data[0].pkt.id == 1);
    }

    TEST_CASE("worse duplicate reply with the same seq does not change the route")
    {
        Router b(B, {});
        b.ProcessRreq(Rreq(A, C, 1), A, t0);
        b.ProcessRrep(Rrep(C, A, 6, 1), D, t0);
        const auto out = b.ProcessRrep(Rrep(C, A, 6, 3), C, t0);
        CHECK(out.empty());
        CHECK(b.Routes().Find(C)->nextHop == D);
        CHECK(b.Routes().Find(C)->hopCount == 2);
    }

    TEST_CASE("reply without a reverse route is dropped")
    {
        Router b(B, {});
        CHECK(b.ProcessRrep(Rrep(C, A, 1), C, t0).empty());
        CHECK(b.Counters().rrepOrphaned == 1);
    }

    TEST_CASE("link break sends an error to each precursor with a bumped seq")
    {
        Router b(B, {});
        b.ProcessRreq(Rreq(A, C, 1), A, t0);
        b.ProcessRrep(Rrep(C, A, 4), C, t0);
        const auto out = b.DetectBrokenRoute(C, nullptr, t0 + Seconds(1));
        const auto uc = Only<action::UnicastControl>(out);
        REQUIRE(uc.size() == 1);
        CHECK(uc[0].to == A);
        CHECK(uc[0].msg.kind == MessageKind::AodvRerr);
        REQUIRE(uc[0].msg.unreachable.size() == 1);
        CHECK(uc[0].msg.unreachable[0].address == C);
        CHECK(uc[0].msg.unreachable[0].seq == SequenceNumber{5});
        CHECK(b.Routes().Lookup(C, t0 + Seconds(1)) == nullptr);
    }

    TEST_CASE("link break without precursors invalidates silently")
    {
        Router b(B, {});
        b.MutableRoutes().Update(C, C, 1, SequenceNumber{1}, t0 + Seconds(100));
        const auto out = b.DetectBrokenRoute(C, nullptr, t0);
        CHECK(out.empty());
        CHECK(b.Routes().Lookup(C, t0) == nullptr);
    }

    TEST_CASE("dest seq never moves backward at a router")
    {
        Router b(B, {});
        b.ProcessRreq(Rreq(A, C, 1), A, t0);
        uint16_t last = 0;
        for (uint16_t seq : {3, 2, 7, 5, 7, 8, 1, 65535})
        {
            b.ProcessRrep(Rrep(C, A, seq, 1), D, t0);
            const auto now = b.Routes().Find(C)->destSeq;
            CHECK_FALSE(SeqNumIsNewer(SequenceNumber{last}, now));
            last = now.Value();
        }
        CHECK(last == 8);
    }

    TEST_CASE("engine trace: an error cascades along a chain to the farthest source")
    {
        // 1 - 2 - 3 - 4 spaced 100 m (lossless); 4 reports to the sink at 1.
        auto pos = Line(4, 100);
        Engine engine(LosslessConfig(Protocol::Aodv), pos, 1);
        engine.ScheduleArrival(TrafficArrival{Seconds(1), Address{4}, Address{1}, DataKind::MeterReport, 16});
        engine.Run(Seconds(2));
        REQUIRE(engine.RouterOf(Address{4}).LookupRoute(Address{1}, Seconds(2)).has_value());
        // Node 2 loses its link to the sink.
        auto& r2 = dynamic_cast<Router&>(engine.RouterOf(Address{2}));
        const auto actions = r2.DetectBrokenRoute(Address{1}, nullptr, Seconds(2));
        const auto rerrs = Only<action::UnicastControl>(actions);
        REQUIRE(rerrs.size() == 1);
        CHECK(rerrs[0].to == Address{3});
        for (const auto& r : rerrs)
        {
            engine.Transmit(Address{2}, r.msg, r.to);
        }
        engine.Run(Seconds(3));
        CHECK_FALSE(engine.RouterOf(Address{3}).LookupRoute(Address{1}, Seconds(3)).has_value());
        CHECK_FALSE(engine.RouterOf(Address{4}).LookupRoute(Address{1}, Seconds(3)).has_value());
    }

    TEST_CASE("forwarder without a route drops and reports to the previous hop")
    {
        Router b(B, {});
        const auto out = b.ReceiveData(MakePacket(1, A, C), A, t0);
        const auto drops = Only<action::DropData>(out);
        REQUIRE(drops.size() == 1);
        CHECK(drops[0].reason == DropReason::NoRoute);
        const auto uc = Only<action::UnicastControl>(out);
        REQUIRE(uc.size() == 1);
        CHECK(uc[0].to == A);
    }
}
