#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xrsim/runtime/switchboard.hpp"
#include "xrsim/runtime/time.hpp"

namespace xrsim {

/// Synthetic compute-time distribution, in milliseconds.
struct CostModel {
    enum class Kind { constant, normal, lognormal };

    Kind kind = Kind::constant;
    double a = 0.0;  ///< constant value | normal mean | lognormal median
    double b = 0.0;  ///< normal stddev | lognormal log-sigma

    static CostModel constant(double ms) { return {Kind::constant, ms, 0.0}; }
    static CostModel normal(double mean_ms, double std_ms) { return {Kind::normal, mean_ms, std_ms}; }
    static CostModel lognormal(double median_ms, double sigma) { return {Kind::lognormal, median_ms, sigma}; }

    /// Accepts "constant:4", "normal:4,1", "lognormal:4,0.3" or a bare number.
    static CostModel parse(std::string_view text);
    std::string to_string() const;

    Duration sample(std::mt19937_64& rng) const;
    bool is_zero() const { return kind == Kind::constant && a == 0.0; }

    bool operator==(const CostModel&) const = default;
};

struct Periodic {
    Period period = Period::from_hz(1);
};

struct Triggered {
    std::string topic;
};

enum class ReadMode { sync, async };

struct TopicRead {
    std::string topic;
    ReadMode mode = ReadMode::async;
};

/// One row of the execution trace.
struct InvocationRecord {
    std::string plugin;
    std::uint64_t seq = 0;  ///< slot index for periodic plugins, input index for triggered ones
    Timestamp start;
    Timestamp end;
    Duration cpu_time;
    bool deadline_met = true;
    bool skipped = false;

    Duration wall() const { return end - start; }
    bool operator==(const InvocationRecord&) const = default;
};

class InvocationContext;

using PluginCallback = std::function<void(InvocationContext&)>;
using CompletionHook = std::function<void(const InvocationRecord&)>;

struct PluginDescriptor {
    std::string name;
    std::variant<Periodic, Triggered> mode;
    Duration deadline;
    PluginCallback callback;
    std::vector<TopicRead> reads;
    std::vector<std::string> writes;
    CostModel cost;
    /// Permits sync reads on topics other than the trigger.
    bool tolerates_blocking = false;
    /// Runs after each completed (not skipped) invocation with its final record.
    CompletionHook on_complete;

    bool periodic() const { return std::holds_alternative<Periodic>(mode); }
    const Period& period() const { return std::get<Periodic>(mode).period; }
    const std::string& trigger_topic() const { return std::get<Triggered>(mode).topic; }
};

/// Handed to a plugin callback for one invocation.
///
/// In simulated mode outputs are buffered and become visible when the
/// invocation completes (start + cost); in wall mode they publish immediately.
class InvocationContext {
public:
    InvocationContext(Switchboard& sb, const PluginDescriptor& desc, std::uint64_t seq, Timestamp start,
                      Duration planned_cost, std::mt19937_64& rng, const AnyEvent* trigger, bool deferred);

    const std::string& plugin() const { return desc_.name; }
    std::uint64_t seq() const { return seq_; }
    Timestamp now() const { return start_; }

    /// Simulated compute time of this invocation (wall mode: synthetic extra time).
    Duration cost() const { return cost_; }
    void set_cost(Duration d);

    std::mt19937_64& rng() { return rng_; }

    const AnyEvent* trigger() const { return trigger_; }
    template <typename T>
    Event<T> input() const {
        if (!trigger_) throw ConfigError("plugin '" + desc_.name + "' has no trigger input");
        return Event<T>{trigger_->ts, trigger_->seq, std::static_pointer_cast<const T>(trigger_->value)};
    }

    template <typename T>
    void publish(const Topic<T>& t, T value, Timestamp ts) {
        publish_erased(t.state(), std::make_shared<const T>(std::move(value)), ts);
    }
    template <typename T>
    void publish_shared(const Topic<T>& t, std::shared_ptr<const T> value, Timestamp ts) {
        publish_erased(t.state(), std::move(value), ts);
    }

    template <typename T>
    std::optional<Event<T>> read_latest(const Topic<T>& t) const {
        return sb_.read_latest(t);
    }

    Switchboard& switchboard() { return sb_; }

    struct PendingPublish {
        std::shared_ptr<detail::TopicState> topic;
        std::shared_ptr<const void> value;
        Timestamp ts;
    };
    std::vector<PendingPublish> take_pending() { return std::move(pending_); }

private:
    void publish_erased(const std::shared_ptr<detail::TopicState>& topic, std::shared_ptr<const void> value,
                        Timestamp ts);

    Switchboard& sb_;
    const PluginDescriptor& desc_;
    std::uint64_t seq_;
    Timestamp start_;
    Duration cost_;
    std::mt19937_64& rng_;
    const AnyEvent* trigger_;
    bool deferred_;
    std::vector<PendingPublish> pending_;
};

}  // namespace xrsim
