#include "xrsim/runtime/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <queue>
#include <thread>
#include <tuple>

#include <time.h>

namespace xrsim {

namespace {

InvocationRecord make_record(const PluginDescriptor& d, std::uint64_t seq, Timestamp start, Timestamp end,
                             Duration cpu) {
    InvocationRecord r;
    r.plugin = d.name;
    r.seq = seq;
    r.start = start;
    r.end = end;
    r.cpu_time = cpu;
    r.deadline_met = (end - start) <= d.deadline;
    r.skipped = false;
    return r;
}

InvocationRecord make_skip(const PluginDescriptor& d, std::uint64_t seq, Timestamp at) {
    InvocationRecord r;
    r.plugin = d.name;
    r.seq = seq;
    r.start = at;
    r.end = at;
    r.deadline_met = true;
    r.skipped = true;
    return r;
}

Duration thread_cpu_now() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return Duration{static_cast<std::int64_t>(ts.tv_sec) * 1'000'000'000 + ts.tv_nsec};
}

}  // namespace

std::uint64_t plugin_seed(std::uint64_t session_seed, std::size_t plugin_index) {
    // splitmix64 finalizer
    std::uint64_t z = session_seed + 0x9E3779B97F4A7C15ull * (plugin_index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Runtime::Runtime(std::shared_ptr<Switchboard> sb) : sb_(std::move(sb)) {}

void Runtime::register_plugin(PluginDescriptor desc) {
    if (desc.name.empty()) throw ConfigError("plugin: name must not be empty");
    for (const auto& p : plugins_)
        if (p.name == desc.name) throw ConfigError("plugin: duplicate name '" + desc.name + "'");
    if (desc.deadline.ns <= 0) throw ConfigError("plugin '" + desc.name + "': deadline must be positive");
    if (!desc.callback) throw ConfigError("plugin '" + desc.name + "': missing callback");
    if (!desc.periodic()) {
        const auto& trig = desc.trigger_topic();
        if (!sb_->has_topic(trig)) throw ConfigError("plugin '" + desc.name + "': unknown trigger topic '" + trig + "'");
    }
    for (const auto& r : desc.reads) {
        if (!sb_->has_topic(r.topic))
            throw ConfigError("plugin '" + desc.name + "': unknown topic '" + r.topic + "'");
        if (r.mode == ReadMode::sync) {
            const bool on_trigger = !desc.periodic() && desc.trigger_topic() == r.topic;
            if (!on_trigger && !desc.tolerates_blocking)
                throw ConfigError("plugin '" + desc.name + "': sync read of '" + r.topic +
                                  "' requires a trigger on it or tolerates_blocking");
        }
    }
    for (const auto& w : desc.writes)
        if (!sb_->has_topic(w)) throw ConfigError("plugin '" + desc.name + "': unknown topic '" + w + "'");
    // Check every slot before binding any, so a conflict leaves no partial state.
    for (const auto& w : desc.writes) {
        auto cur = sb_->writer_of(w);
        if (cur && *cur != desc.name)
            throw WriterConflictError("plugin '" + desc.name + "': topic '" + w + "' already written by '" + *cur +
                                      "'");
    }
    for (const auto& w : desc.writes) sb_->bind_writer(w, desc.name);
    plugins_.push_back(std::move(desc));
}

void Runtime::check_acyclic() const {
    // Edge writer -> reader for each synchronous dependency (trigger or sync read).
    std::map<std::string, std::size_t> writer_of;
    for (std::size_t i = 0; i < plugins_.size(); ++i)
        for (const auto& w : plugins_[i].writes) writer_of[w] = i;

    std::vector<std::vector<std::size_t>> adj(plugins_.size());
    auto add_edge = [&](const std::string& topic, std::size_t reader) {
        auto it = writer_of.find(topic);
        if (it != writer_of.end()) adj[it->second].push_back(reader);
    };
    for (std::size_t i = 0; i < plugins_.size(); ++i) {
        const auto& p = plugins_[i];
        if (!p.periodic()) add_edge(p.trigger_topic(), i);
        for (const auto& r : p.reads)
            if (r.mode == ReadMode::sync && (p.periodic() || r.topic != p.trigger_topic())) add_edge(r.topic, i);
    }

    enum class Mark { none, active, done };
    std::vector<Mark> mark(plugins_.size(), Mark::none);
    std::function<void(std::size_t)> visit = [&](std::size_t u) {
        mark[u] = Mark::active;
        for (auto v : adj[u]) {
            if (mark[v] == Mark::active)
                throw ConfigError("runtime: synchronous dependency cycle through '" + plugins_[v].name + "'");
            if (mark[v] == Mark::none) visit(v);
        }
        mark[u] = Mark::done;
    };
    for (std::size_t i = 0; i < plugins_.size(); ++i)
        if (mark[i] == Mark::none) visit(i);
}

std::vector<InvocationRecord> Runtime::run(Clock& clock, Duration duration, std::uint64_t seed) {
    if (ran_) throw ConfigError("runtime: run() may only be called once");
    if (duration.ns <= 0) throw ConfigError("runtime: duration must be positive");
    check_acyclic();
    ran_ = true;
    return clock.mode() == ClockMode::simulated ? run_simulated(clock, duration, seed)
                                                : run_wall(clock, duration, seed);
}

void Runtime::sort_trace(std::vector<InvocationRecord>& trace) const {
    std::map<std::string, std::size_t, std::less<>> order;
    for (std::size_t i = 0; i < plugins_.size(); ++i) order[plugins_[i].name] = i;
    std::stable_sort(trace.begin(), trace.end(), [&](const InvocationRecord& a, const InvocationRecord& b) {
        return std::tuple(a.start, order[a.plugin], a.seq) < std::tuple(b.start, order[b.plugin], b.seq);
    });
}

// ---------------------------------------------------------------------------
// Simulated mode

namespace {

enum class EventKind { completion = 0, trigger_start = 1, slot = 2 };

struct SimEvent {
    Timestamp at;
    EventKind kind;
    std::size_t plugin;
    std::uint64_t insertion;
    std::int64_t slot = 0;

    auto key() const { return std::tuple(at, static_cast<int>(kind), plugin, insertion); }
    bool operator>(const SimEvent& o) const { return key() > o.key(); }
};

struct SimPlugin {
    std::mt19937_64 rng;
    std::shared_ptr<SyncQueue> inputs;
    bool busy = false;
    bool start_pending = false;
    std::uint64_t next_input_seq = 0;
    // in-flight invocation
    std::uint64_t seq = 0;
    Timestamp start;
    Duration cost;
    std::vector<InvocationContext::PendingPublish> outputs;
};

}  // namespace

std::vector<InvocationRecord> Runtime::run_simulated(Clock& clock, Duration duration, std::uint64_t seed) {
    clock.start();
    const Timestamp horizon = Timestamp{} + duration;
    std::vector<InvocationRecord> trace;

    std::vector<SimPlugin> state(plugins_.size());
    std::map<std::string, std::vector<std::size_t>, std::less<>> triggered_by;
    for (std::size_t i = 0; i < plugins_.size(); ++i) {
        state[i].rng.seed(plugin_seed(seed, i));
        if (!plugins_[i].periodic()) {
            auto topic = sb_->find(plugins_[i].trigger_topic());
            state[i].inputs = sb_->subscribe_erased(*topic, OverflowPolicy::error);
            triggered_by[topic->name].push_back(i);
        }
    }

    std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> events;
    std::uint64_t insertion = 0;
    auto push = [&](Timestamp at, EventKind kind, std::size_t p, std::int64_t slot = 0) {
        events.push(SimEvent{at, kind, p, insertion++, slot});
    };

    for (std::size_t i = 0; i < plugins_.size(); ++i)
        if (plugins_[i].periodic()) push(plugins_[i].period().slot(0), EventKind::slot, i, 0);

    auto maybe_schedule_trigger = [&](std::size_t i, Timestamp at) {
        auto& s = state[i];
        if (s.busy || s.start_pending || s.inputs->size() == 0) return;
        s.start_pending = true;
        push(at, EventKind::trigger_start, i);
    };

    auto start_invocation = [&](std::size_t i, Timestamp at, std::uint64_t seq, const AnyEvent* input) {
        const auto& d = plugins_[i];
        auto& s = state[i];
        const Duration planned = d.cost.sample(s.rng);
        InvocationContext ctx(*sb_, d, seq, at, planned, s.rng, input, /*deferred=*/true);
        try {
            d.callback(ctx);
        } catch (...) {
            sort_trace(trace);
            throw RunAborted("plugin '" + d.name + "' failed at t=" + std::to_string(at.ns) + "ns", std::move(trace),
                             std::current_exception());
        }
        s.busy = true;
        s.seq = seq;
        s.start = at;
        s.cost = ctx.cost();
        s.outputs = ctx.take_pending();
        push(at + s.cost, EventKind::completion, i);
    };

    while (!events.empty()) {
        const SimEvent ev = events.top();
        events.pop();
        clock.advance_to(ev.at);
        const auto& d = plugins_[ev.plugin];
        auto& s = state[ev.plugin];

        switch (ev.kind) {
            case EventKind::slot: {
                if (s.busy) {
                    trace.push_back(make_skip(d, static_cast<std::uint64_t>(ev.slot), ev.at));
                } else {
                    start_invocation(ev.plugin, ev.at, static_cast<std::uint64_t>(ev.slot), nullptr);
                }
                const Timestamp next = d.period().slot(ev.slot + 1);
                if (next < horizon) push(next, EventKind::slot, ev.plugin, ev.slot + 1);
                break;
            }
            case EventKind::trigger_start: {
                s.start_pending = false;
                if (s.busy || ev.at >= horizon) break;
                auto input = s.inputs->try_pop();
                if (!input) break;
                start_invocation(ev.plugin, ev.at, s.next_input_seq++, &*input);
                break;
            }
            case EventKind::completion: {
                auto outputs = std::move(s.outputs);
                s.outputs.clear();
                try {
                    for (auto& out : outputs) sb_->publish_erased(*out.topic, d.name, std::move(out.value), out.ts);
                } catch (...) {
                    sort_trace(trace);
                    throw RunAborted("plugin '" + d.name + "' output rejected", std::move(trace),
                                     std::current_exception());
                }
                s.busy = false;
                auto rec = make_record(d, s.seq, s.start, ev.at, s.cost);
                trace.push_back(rec);
                if (d.on_complete) d.on_complete(rec);
                for (const auto& out : outputs) {
                    auto it = triggered_by.find(out.topic->name);
                    if (it == triggered_by.end()) continue;
                    for (auto j : it->second) maybe_schedule_trigger(j, ev.at);
                }
                if (!d.periodic()) maybe_schedule_trigger(ev.plugin, ev.at);
                break;
            }
        }
    }

    sort_trace(trace);
    return trace;
}

// ---------------------------------------------------------------------------
// Wall mode

std::vector<InvocationRecord> Runtime::run_wall(Clock& clock, Duration duration, std::uint64_t seed) {
    clock.start();
    const auto epoch = clock.epoch();
    const Timestamp horizon = Timestamp{} + duration;
    auto to_tp = [&](Timestamp t) { return epoch + std::chrono::nanoseconds(t.ns); };

    std::atomic<bool> stop{false};
    std::mutex trace_mu;
    std::vector<InvocationRecord> trace;
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto fail = [&](std::exception_ptr e) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = e;
        stop = true;
    };
    auto emit = [&](InvocationRecord r) {
        std::lock_guard lock(trace_mu);
        trace.push_back(std::move(r));
    };

    auto invoke = [&](const PluginDescriptor& d, std::mt19937_64& rng, std::uint64_t seq, const AnyEvent* input) {
        const Timestamp start = clock.now();
        const Duration cpu0 = thread_cpu_now();
        InvocationContext ctx(*sb_, d, seq, start, d.cost.sample(rng), rng, input, /*deferred=*/false);
        d.callback(ctx);
        if (ctx.cost().ns > 0) std::this_thread::sleep_for(std::chrono::nanoseconds(ctx.cost().ns));
        const Timestamp end = clock.now();
        auto rec = make_record(d, seq, start, end, thread_cpu_now() - cpu0);
        emit(rec);
        if (d.on_complete) d.on_complete(rec);
        return end;
    };

    std::vector<std::thread> periodic_threads;
    std::vector<std::thread> triggered_threads;
    std::vector<std::shared_ptr<SyncQueue>> inputs(plugins_.size());
    for (std::size_t i = 0; i < plugins_.size(); ++i)
        if (!plugins_[i].periodic())
            inputs[i] = sb_->subscribe_erased(*sb_->find(plugins_[i].trigger_topic()), OverflowPolicy::drop_oldest);

    for (std::size_t i = 0; i < plugins_.size(); ++i) {
        const auto& d = plugins_[i];
        if (d.periodic()) {
            periodic_threads.emplace_back([&, i] {
                const auto& desc = plugins_[i];
                std::mt19937_64 rng(plugin_seed(seed, i));
                const Period& period = desc.period();
                try {
                    std::int64_t k = 0;
                    while (!stop && period.slot(k) < horizon) {
                        std::this_thread::sleep_until(to_tp(period.slot(k)));
                        if (stop) break;
                        const Timestamp end = invoke(desc, rng, static_cast<std::uint64_t>(k), nullptr);
                        const std::int64_t next = std::max(k + 1, period.first_slot_at_or_after(end));
                        for (std::int64_t m = k + 1; m < next && period.slot(m) < horizon; ++m)
                            emit(make_skip(desc, static_cast<std::uint64_t>(m), period.slot(m)));
                        k = next;
                    }
                } catch (...) {
                    fail(std::current_exception());
                }
            });
        } else {
            triggered_threads.emplace_back([&, i] {
                const auto& desc = plugins_[i];
                std::mt19937_64 rng(plugin_seed(seed, i));
                std::uint64_t seq = 0;
                try {
                    for (;;) {
                        auto ev = inputs[i]->pop_for(std::chrono::milliseconds(5));
                        if (!ev) {
                            if (stop) break;
                            continue;
                        }
                        if (clock.now() >= horizon) break;
                        invoke(desc, rng, seq++, &*ev);
                    }
                } catch (...) {
                    fail(std::current_exception());
                }
            });
        }
    }

    while (!stop && clock.now() < horizon) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    for (auto& t : periodic_threads) t.join();
    stop = true;
    for (auto& q : inputs)
        if (q) q->close();
    for (auto& t : triggered_threads) t.join();

    sort_trace(trace);
    if (failure) throw RunAborted("plugin failed in wall-clock run", std::move(trace), failure);
    return trace;
}

}  // namespace xrsim
