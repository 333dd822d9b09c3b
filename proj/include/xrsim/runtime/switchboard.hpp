#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <typeindex>
#include <utility>
#include <vector>

#include "xrsim/runtime/errors.hpp"
#include "xrsim/runtime/time.hpp"

namespace xrsim {

/// A published value with its stream metadata. Payloads are immutable once
/// published and shared between all readers.
struct AnyEvent {
    Timestamp ts;
    std::uint64_t seq = 0;  ///< 1-based position in the topic's publish sequence
    std::shared_ptr<const void> value;
};

template <typename T>
struct Event {
    Timestamp ts;
    std::uint64_t seq = 0;
    std::shared_ptr<const T> value;

    const T& operator*() const { return *value; }
    const T* operator->() const { return value.get(); }
};

/// What a synchronous reader queue does when it is full.
enum class OverflowPolicy {
    error,        ///< throw OverflowError at the publisher (simulated mode)
    drop_oldest,  ///< evict the oldest entry and count it (wall mode)
    block,        ///< publisher waits for space (backpressure)
};

/// Bounded FIFO behind one synchronous reader.
class SyncQueue {
public:
    SyncQueue(std::size_t capacity, OverflowPolicy policy);

    void push(AnyEvent ev);
    std::optional<AnyEvent> try_pop();
    /// Waits up to `timeout`; empty result on timeout or close.
    std::optional<AnyEvent> pop_for(std::chrono::nanoseconds timeout);
    /// Blocks until a value arrives; empty result once closed and drained.
    std::optional<AnyEvent> pop();
    void close();

    std::size_t size() const;
    std::size_t capacity() const { return capacity_; }
    std::uint64_t dropped() const;
    std::size_t high_water() const;
    bool closed() const;

private:
    const std::size_t capacity_;
    const OverflowPolicy policy_;
    mutable std::mutex mu_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<AnyEvent> items_;
    std::uint64_t dropped_ = 0;
    std::size_t high_water_ = 0;
    bool closed_ = false;
};

namespace detail {

struct TopicState {
    TopicState(std::string n, std::type_index k) : name(std::move(n)), kind(k) {}

    const std::string name;
    const std::type_index kind;

    std::mutex write_mu;
    std::optional<std::string> writer;
    std::optional<Timestamp> last_ts;
    std::uint64_t seq = 0;
    std::vector<std::weak_ptr<SyncQueue>> readers;

    mutable std::mutex latest_mu;
    std::optional<AnyEvent> latest;
};

}  // namespace detail

/// Non-owning, copyable handle to a topic of payload type T.
template <typename T>
class Topic {
public:
    Topic() = default;
    const std::string& name() const { return state_->name; }
    bool valid() const { return state_ != nullptr; }
    const std::shared_ptr<detail::TopicState>& state() const { return state_; }

private:
    friend class Switchboard;
    explicit Topic(std::shared_ptr<detail::TopicState> s) : state_(std::move(s)) {}
    std::shared_ptr<detail::TopicState> state_;
};

/// Sees every value published after subscription, in order, exactly once.
template <typename T>
class SyncReader {
public:
    SyncReader() = default;
    explicit SyncReader(std::shared_ptr<SyncQueue> q) : queue_(std::move(q)) {}
    SyncReader(SyncReader&&) noexcept = default;
    SyncReader& operator=(SyncReader&&) noexcept = default;
    SyncReader(const SyncReader&) = delete;
    SyncReader& operator=(const SyncReader&) = delete;
    ~SyncReader() {
        if (queue_) queue_->close();
    }

    std::optional<Event<T>> try_pop() { return cast(queue_->try_pop()); }
    std::optional<Event<T>> pop() { return cast(queue_->pop()); }
    std::optional<Event<T>> pop_for(std::chrono::nanoseconds timeout) { return cast(queue_->pop_for(timeout)); }

    std::size_t pending() const { return queue_->size(); }
    std::uint64_t dropped() const { return queue_->dropped(); }
    std::size_t high_water() const { return queue_->high_water(); }
    const std::shared_ptr<SyncQueue>& queue() const { return queue_; }

private:
    static std::optional<Event<T>> cast(std::optional<AnyEvent> ev) {
        if (!ev) return std::nullopt;
        return Event<T>{ev->ts, ev->seq, std::static_pointer_cast<const T>(ev->value)};
    }
    std::shared_ptr<SyncQueue> queue_;
};

class Switchboard;

/// Publishing capability for one topic, bound to its unique writer.
template <typename T>
class Writer {
public:
    Writer() = default;
    void publish(T value, Timestamp ts) const;
    void publish_shared(std::shared_ptr<const T> value, Timestamp ts) const;
    const Topic<T>& topic() const { return topic_; }
    const std::string& owner() const { return owner_; }

private:
    friend class Switchboard;
    Writer(Switchboard* sb, Topic<T> t, std::string owner) : sb_(sb), topic_(std::move(t)), owner_(std::move(owner)) {}
    Switchboard* sb_ = nullptr;
    Topic<T> topic_;
    std::string owner_;
};

/// Registry of named, typed, single-writer event streams.
///
/// Thread-safe: many reader contexts and one writer context per topic.
class Switchboard {
public:
    static constexpr std::size_t kDefaultQueueBound = 4096;

    explicit Switchboard(OverflowPolicy default_policy = OverflowPolicy::drop_oldest,
                         std::size_t queue_bound = kDefaultQueueBound);

    Switchboard(const Switchboard&) = delete;
    Switchboard& operator=(const Switchboard&) = delete;

    template <typename T>
    Topic<T> create_topic(std::string name) {
        return Topic<T>(create_erased(std::move(name), std::type_index(typeid(T))));
    }

    /// Looks up an existing topic; throws ConfigError if absent or of another payload kind.
    template <typename T>
    Topic<T> topic(std::string_view name) const {
        auto s = find(name);
        if (s->kind != std::type_index(typeid(T)))
            throw ConfigError("switchboard: topic '" + std::string(name) + "' has a different payload kind");
        return Topic<T>(std::move(s));
    }

    bool has_topic(std::string_view name) const;
    std::vector<std::string> topic_names() const;
    std::type_index kind_of(std::string_view name) const;
    std::shared_ptr<detail::TopicState> find(std::string_view name) const;

    /// Binds `owner` as the unique writer of `topic`.
    void bind_writer(std::string_view topic, const std::string& owner);
    std::optional<std::string> writer_of(std::string_view topic) const;

    template <typename T>
    Writer<T> writer(const Topic<T>& t, std::string owner) {
        bind_writer(t.name(), owner);
        return Writer<T>(this, t, std::move(owner));
    }

    template <typename T>
    void publish(const Topic<T>& t, std::string_view writer, T value, Timestamp ts) {
        publish_erased(*t.state(), writer, std::make_shared<const T>(std::move(value)), ts);
    }

    template <typename T>
    void publish_shared(const Topic<T>& t, std::string_view writer, std::shared_ptr<const T> value, Timestamp ts) {
        publish_erased(*t.state(), writer, std::move(value), ts);
    }

    /// Checks writer identity and timestamp order, then makes the value
    /// visible to async readers and enqueues it for every sync reader.
    void publish_erased(detail::TopicState& topic, std::string_view writer, std::shared_ptr<const void> value,
                        Timestamp ts);

    /// Latest published value; never blocks.
    template <typename T>
    std::optional<Event<T>> read_latest(const Topic<T>& t) const {
        auto ev = read_latest_erased(*t.state());
        if (!ev) return std::nullopt;
        return Event<T>{ev->ts, ev->seq, std::static_pointer_cast<const T>(ev->value)};
    }
    std::optional<AnyEvent> read_latest_erased(const detail::TopicState& topic) const;

    template <typename T>
    SyncReader<T> subscribe_sync(const Topic<T>& t, std::optional<OverflowPolicy> policy = std::nullopt) {
        return SyncReader<T>(subscribe_erased(*t.state(), policy));
    }
    std::shared_ptr<SyncQueue> subscribe_erased(detail::TopicState& topic,
                                                std::optional<OverflowPolicy> policy = std::nullopt);

    OverflowPolicy default_policy() const { return default_policy_; }
    void set_default_policy(OverflowPolicy p) { default_policy_ = p; }
    std::size_t queue_bound() const { return queue_bound_; }

private:
    std::shared_ptr<detail::TopicState> create_erased(std::string name, std::type_index kind);

    mutable std::mutex registry_mu_;
    std::map<std::string, std::shared_ptr<detail::TopicState>, std::less<>> topics_;
    OverflowPolicy default_policy_;
    std::size_t queue_bound_;
};

template <typename T>
void Writer<T>::publish(T value, Timestamp ts) const {
    sb_->publish(topic_, owner_, std::move(value), ts);
}

template <typename T>
void Writer<T>::publish_shared(std::shared_ptr<const T> value, Timestamp ts) const {
    sb_->publish_shared(topic_, owner_, std::move(value), ts);
}

}  // namespace xrsim
