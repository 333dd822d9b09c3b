#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "support/stress.hpp"
#include "xrsim/runtime/runtime.hpp"
#include "xrsim/runtime/trace.hpp"

using namespace xrsim;

namespace {

PluginDescriptor periodic(std::string name, std::int64_t hz, double cost_ms = 0.0) {
    PluginDescriptor d;
    d.name = std::move(name);
    d.mode = Periodic{Period::from_hz(hz)};
    d.deadline = Period::from_hz(hz).nominal();
    d.cost = CostModel::constant(cost_ms);
    d.callback = [](InvocationContext&) {};
    return d;
}

std::size_t count(const std::vector<InvocationRecord>& t, const std::string& name, bool skipped = false) {
    std::size_t n = 0;
    for (const auto& r : t) n += r.plugin == name && r.skipped == skipped;
    return n;
}

}  // namespace

TEST(Time, PeriodSlotsAreExactOverLongHorizons) {
    const auto p = Period::from_hz(120);
    EXPECT_EQ(p.slot(120).ns, 1'000'000'000);
    EXPECT_EQ(p.slot(1).ns, 8'333'333);
    EXPECT_EQ(p.slots_before(Timestamp{} + Duration::seconds(30)), 3600);
    EXPECT_EQ(p.first_slot_at_or_after(Timestamp{8'333'334}), 2);
    EXPECT_EQ(p.last_slot_at_or_before(Timestamp{8'333'333}), 1);
}

TEST(Clock, SimulatedAdvancesOnlyWhenStepped) {
    auto c = Clock::simulated(Duration::millis(2));
    EXPECT_EQ(c.now().ns, 0);
    c.step();
    c.step();
    EXPECT_EQ(c.now().ns, 4'000'000);
    c.advance_to(Timestamp{10'000'000});
    EXPECT_EQ(c.now().ns, 10'000'000);
}

TEST(Switchboard, CreatesTheEightPipelineTopics) {
    Switchboard sb;
    std::set<std::string> names;
    for (const char* n : {"camera", "imu", "vio_pose", "integrated_pose", "rendered_frame", "reprojected_frame",
                          "audio_in", "audio_out"}) {
        auto t = sb.create_topic<int>(n);
        names.insert(t.name());
    }
    EXPECT_EQ(names.size(), 8u);
    EXPECT_EQ(sb.topic_names().size(), 8u);
    EXPECT_THROW(sb.create_topic<int>("imu"), ConfigError);
}

TEST(Switchboard, LatestValueSemantics) {
    Switchboard sb;
    auto t = sb.create_topic<int>("x");
    auto w = sb.writer(t, "p");
    EXPECT_FALSE(sb.read_latest(t).has_value());
    w.publish(1, Timestamp{1});
    w.publish(2, Timestamp{2});
    w.publish(3, Timestamp{3});
    ASSERT_TRUE(sb.read_latest(t));
    EXPECT_EQ(**sb.read_latest(t), 3);
}

TEST(Switchboard, RejectsTimestampRegressionAndForeignWriters) {
    Switchboard sb;
    auto t = sb.create_topic<int>("x");
    auto w = sb.writer(t, "p");
    w.publish(1, Timestamp{5});
    w.publish(2, Timestamp{5});  // equal is fine
    EXPECT_THROW(w.publish(3, Timestamp{4}), OrderingError);
    EXPECT_THROW(sb.publish(t, "intruder", 4, Timestamp{9}), PermissionError);
    EXPECT_THROW(sb.bind_writer("x", "second"), WriterConflictError);
    EXPECT_THROW(sb.topic<double>("x"), ConfigError);
}

TEST(Switchboard, SyncReadersSeeEverythingInOrder) {
    Switchboard sb;
    auto t = sb.create_topic<char>("letters");
    auto w = sb.writer(t, "p");
    auto r1 = sb.subscribe_sync(t);
    auto r2 = sb.subscribe_sync(t);
    for (char c : {'a', 'b', 'c'}) w.publish(c, Timestamp{c});
    std::string s1, s2;
    while (auto e = r1.try_pop()) s1 += **e;
    while (auto e = r2.try_pop()) s2 += **e;
    EXPECT_EQ(s1, "abc");
    EXPECT_EQ(s2, "abc");
}

TEST(Switchboard, SlowReaderBuffersUpToTheBound) {
    Switchboard sb(OverflowPolicy::error, 16);
    auto t = sb.create_topic<int>("x");
    auto w = sb.writer(t, "p");
    auto r = sb.subscribe_sync(t);
    for (int i = 0; i < 16; ++i) w.publish(i, Timestamp{i});
    EXPECT_EQ(r.pending(), 16u);
    EXPECT_THROW(w.publish(16, Timestamp{16}), OverflowError);
    for (int i = 0; i < 16; ++i) EXPECT_EQ(**r.try_pop(), i);

    Switchboard lossy(OverflowPolicy::drop_oldest, 4);
    auto u = lossy.create_topic<int>("y");
    auto wu = lossy.writer(u, "p");
    auto ru = lossy.subscribe_sync(u);
    for (int i = 0; i < 10; ++i) wu.publish(i, Timestamp{i});
    EXPECT_EQ(ru.dropped(), 6u);
    EXPECT_EQ(**ru.try_pop(), 6);
}

TEST(Switchboard, DefaultQueueBoundIs4096) { EXPECT_EQ(Switchboard().queue_bound(), 4096u); }

TEST(Switchboard, ConcurrentStressSmall) {
    const auto r = support::switchboard_stress(20000, 2, 2);
    for (auto n : r.sync_received) EXPECT_EQ(n, 20000u);
    EXPECT_EQ(r.sync_out_of_order, 0u);
    EXPECT_EQ(r.torn, 0u);
    EXPECT_EQ(r.async_regressions, 0u);
}

TEST(Runtime, FiveHundredHertzForOneSecond) {
    Runtime rt;
    rt.switchboard().create_topic<int>("imu");
    auto d = periodic("imu", 500);
    d.writes = {"imu"};
    rt.register_plugin(d);
    auto clock = Clock::simulated();
    const auto trace = rt.run(clock, Duration::seconds(1));
    EXPECT_EQ(count(trace, "imu"), 500u);
    EXPECT_EQ(trace.front().start.ns, 0);
    EXPECT_EQ(trace.back().start.ns, 998'000'000);
}

TEST(Runtime, RegistrationErrors) {
    Runtime rt;
    auto& sb = rt.switchboard();
    sb.create_topic<int>("a");
    auto p1 = periodic("one", 10);
    p1.writes = {"a"};
    rt.register_plugin(p1);
    auto p2 = periodic("two", 10);
    p2.writes = {"a"};
    EXPECT_THROW(rt.register_plugin(p2), WriterConflictError);
    auto p3 = periodic("three", 10);
    p3.reads = {{"missing", ReadMode::async}};
    EXPECT_THROW(rt.register_plugin(p3), ConfigError);
    auto p4 = periodic("four", 10);
    p4.reads = {{"a", ReadMode::sync}};
    EXPECT_THROW(rt.register_plugin(p4), ConfigError);  // sync read without trigger or blocking tolerance
    auto p5 = periodic("one", 10);
    EXPECT_THROW(rt.register_plugin(p5), ConfigError);
    auto p6 = periodic("six", 10);
    p6.deadline = Duration{};
    EXPECT_THROW(rt.register_plugin(p6), ConfigError);
}

TEST(Runtime, SynchronousCycleIsRejected) {
    Runtime rt;
    auto& sb = rt.switchboard();
    sb.create_topic<int>("x");
    sb.create_topic<int>("y");
    PluginDescriptor a;
    a.name = "a";
    a.mode = Triggered{"y"};
    a.deadline = Duration::millis(1);
    a.callback = [](InvocationContext&) {};
    a.writes = {"x"};
    PluginDescriptor b = a;
    b.name = "b";
    b.mode = Triggered{"x"};
    b.writes = {"y"};
    rt.register_plugin(a);
    rt.register_plugin(b);
    EXPECT_THROW(rt.check_acyclic(), ConfigError);
    auto clock = Clock::simulated();
    EXPECT_THROW(rt.run(clock, Duration::seconds(1)), ConfigError);
}

namespace {

// camera at 15 Hz feeding a triggered VIO that takes `vio_ms` per frame
std::vector<InvocationRecord> camera_vio(double vio_ms, Duration horizon) {
    Runtime rt;
    auto cam = rt.switchboard().create_topic<int>("camera");
    rt.switchboard().create_topic<int>("vio_pose");
    auto c = periodic("camera", 15);
    c.writes = {"camera"};
    c.callback = [cam](InvocationContext& ctx) { ctx.publish(cam, static_cast<int>(ctx.seq()), ctx.now()); };
    rt.register_plugin(c);
    PluginDescriptor v;
    v.name = "vio";
    v.mode = Triggered{"camera"};
    v.deadline = Period::from_hz(15).nominal();
    v.reads = {{"camera", ReadMode::sync}};
    v.writes = {"vio_pose"};
    v.cost = CostModel::constant(vio_ms);
    v.callback = [](InvocationContext&) {};
    rt.register_plugin(v);
    auto clock = Clock::simulated();
    return rt.run(clock, horizon);
}

}  // namespace

TEST(Runtime, TriggeredPluginProcessesEveryFrameEvenWhenOverrunning) {
    const auto trace = camera_vio(80.0, Duration::seconds(1));
    EXPECT_EQ(count(trace, "camera"), 15u);
    // 80 ms per frame: starts at 0, 80, ... 960 ms fit in the horizon, the rest are still queued
    EXPECT_EQ(count(trace, "vio"), 13u);
    std::vector<InvocationRecord> vio;
    for (const auto& r : trace)
        if (r.plugin == "vio") vio.push_back(r);
    for (std::size_t i = 0; i < vio.size(); ++i) {
        EXPECT_EQ(vio[i].seq, i);
        EXPECT_FALSE(vio[i].deadline_met);
        if (i > 0) {
            EXPECT_GE(vio[i].start, vio[i - 1].end);  // serialized, never preempted
        }
    }
}

TEST(Runtime, OverrunningPeriodicPluginSkipsSlots) {
    Runtime rt;
    rt.register_plugin(periodic("reprojection", 120, 12.0));
    auto clock = Clock::simulated();
    const auto trace = rt.run(clock, Duration::seconds(1));
    EXPECT_EQ(count(trace, "reprojection"), 60u);
    EXPECT_EQ(count(trace, "reprojection", true), 60u);
    for (const auto& r : trace) {
        if (r.skipped) {
            EXPECT_EQ(r.seq % 2, 1u);
            EXPECT_EQ(r.start, r.end);
        } else {
            EXPECT_EQ(r.seq % 2, 0u);
            EXPECT_FALSE(r.deadline_met);
        }
    }
}

TEST(Runtime, DeadlineBookkeepingMatchesDurations) {
    Runtime rt;
    auto d = periodic("jittery", 100);
    d.cost = CostModel::normal(9.0, 2.0);
    rt.register_plugin(d);
    auto clock = Clock::simulated();
    const auto trace = rt.run(clock, Duration::seconds(2), 7);
    std::size_t misses = 0;
    for (const auto& r : trace) {
        ASSERT_GE(r.end, r.start);
        if (!r.skipped) {
            EXPECT_EQ(r.deadline_met, r.wall() <= d.deadline);
        }
        misses += !r.deadline_met;
    }
    EXPECT_GT(misses, 0u);
}

TEST(Runtime, SimulatedRunsAreDeterministic) {
    auto once = [] {
        Runtime rt;
        auto d = periodic("a", 90);
        d.cost = CostModel::lognormal(6.0, 0.5);
        rt.register_plugin(d);
        rt.register_plugin(periodic("b", 500, 0.5));
        auto clock = Clock::simulated();
        std::ostringstream os;
        write_trace_csv(os, rt.run(clock, Duration::seconds(1), 42));
        return os.str();
    };
    EXPECT_EQ(once(), once());
}

TEST(Runtime, SameInstantTiesRunInRegistrationOrder) {
    Runtime rt;
    std::vector<std::string> order;
    for (const char* n : {"first", "second", "third"}) {
        auto d = periodic(n, 10);
        d.callback = [&order, n](InvocationContext&) { order.push_back(n); };
        rt.register_plugin(d);
    }
    auto clock = Clock::simulated();
    rt.run(clock, Duration::millis(50));
    ASSERT_EQ(order.size(), 3u);
    EXPECT_EQ(order[0], "first");
    EXPECT_EQ(order[1], "second");
    EXPECT_EQ(order[2], "third");
}

TEST(Runtime, FailureAbortsWithPartialTrace) {
    Runtime rt;
    auto d = periodic("fragile", 100);
    d.callback = [](InvocationContext& ctx) {
        if (ctx.seq() == 5) throw std::runtime_error("boom");
    };
    rt.register_plugin(d);
    auto clock = Clock::simulated();
    try {
        rt.run(clock, Duration::seconds(1));
        FAIL() << "expected RunAborted";
    } catch (const RunAborted& e) {
        EXPECT_EQ(e.partial_trace.size(), 5u);
        EXPECT_TRUE(e.cause);
    }
}

TEST(Runtime, WallModeRunsPeriodicAndTriggeredPlugins) {
    Runtime rt;
    auto t = rt.switchboard().create_topic<int>("tick");
    rt.switchboard().create_topic<int>("out");
    auto src = periodic("source", 100);
    src.writes = {"tick"};
    src.callback = [t](InvocationContext& ctx) { ctx.publish(t, 1, ctx.now()); };
    rt.register_plugin(src);
    PluginDescriptor sink;
    sink.name = "sink";
    sink.mode = Triggered{"tick"};
    sink.deadline = Duration::millis(10);
    sink.reads = {{"tick", ReadMode::sync}};
    sink.writes = {"out"};
    sink.callback = [](InvocationContext&) {};
    rt.register_plugin(sink);
    auto clock = Clock::wall();
    const auto trace = rt.run(clock, Duration::millis(300));
    const auto n = count(trace, "source");
    EXPECT_GE(n, 25u);  // best effort on a loaded machine
    EXPECT_LE(n, 30u);
    EXPECT_GE(count(trace, "sink"), n - 2);
}

TEST(Trace, CsvRoundTrip) {
    std::vector<InvocationRecord> t{{"a", 0, Timestamp{0}, Timestamp{5}, Duration{3}, true, false},
                                    {"b", 7, Timestamp{9}, Timestamp{9}, Duration{0}, true, true}};
    std::stringstream ss;
    write_trace_csv(ss, t);
    EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "plugin,seq,start_ns,end_ns,cpu_ns,deadline_met,skipped");
    EXPECT_EQ(read_trace_csv(ss), t);
    std::stringstream bad("plugin,seq\n1,2\n");
    EXPECT_THROW(read_trace_csv(bad), InputError);
}

TEST(CostModel, ParseAndFormat) {
    EXPECT_EQ(CostModel::parse("4"), CostModel::constant(4));
    EXPECT_EQ(CostModel::parse("normal:4,1").to_string(), "normal:4,1");
    EXPECT_EQ(CostModel::parse("lognormal:2,0.3"), CostModel::lognormal(2, 0.3));
    EXPECT_THROW(CostModel::parse("uniform:1,2"), ConfigError);
    EXPECT_THROW(CostModel::parse("-1"), ConfigError);
}
