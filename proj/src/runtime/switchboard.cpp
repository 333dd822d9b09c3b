#include "xrsim/runtime/switchboard.hpp"

#include <algorithm>

namespace xrsim {

SyncQueue::SyncQueue(std::size_t capacity, OverflowPolicy policy) : capacity_(capacity), policy_(policy) {
    if (capacity_ == 0) throw ConfigError("sync queue: capacity must be positive");
}

void SyncQueue::push(AnyEvent ev) {
    std::unique_lock lock(mu_);
    if (closed_) return;
    if (items_.size() >= capacity_) {
        switch (policy_) {
            case OverflowPolicy::error:
                throw OverflowError("sync reader queue overflow (bound " + std::to_string(capacity_) + ")");
            case OverflowPolicy::drop_oldest:
                items_.pop_front();
                ++dropped_;
                break;
            case OverflowPolicy::block:
                not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
                if (closed_) return;
                break;
        }
    }
    items_.push_back(std::move(ev));
    high_water_ = std::max(high_water_, items_.size());
    lock.unlock();
    not_empty_.notify_one();
}

std::optional<AnyEvent> SyncQueue::try_pop() {
    std::unique_lock lock(mu_);
    if (items_.empty()) return std::nullopt;
    AnyEvent ev = std::move(items_.front());
    items_.pop_front();
    lock.unlock();
    not_full_.notify_one();
    return ev;
}

std::optional<AnyEvent> SyncQueue::pop_for(std::chrono::nanoseconds timeout) {
    std::unique_lock lock(mu_);
    if (!not_empty_.wait_for(lock, timeout, [&] { return !items_.empty() || closed_; })) return std::nullopt;
    if (items_.empty()) return std::nullopt;
    AnyEvent ev = std::move(items_.front());
    items_.pop_front();
    lock.unlock();
    not_full_.notify_one();
    return ev;
}

std::optional<AnyEvent> SyncQueue::pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;
    AnyEvent ev = std::move(items_.front());
    items_.pop_front();
    lock.unlock();
    not_full_.notify_one();
    return ev;
}

void SyncQueue::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    not_empty_.notify_all();
    not_full_.notify_all();
}

std::size_t SyncQueue::size() const {
    std::lock_guard lock(mu_);
    return items_.size();
}

std::uint64_t SyncQueue::dropped() const {
    std::lock_guard lock(mu_);
    return dropped_;
}

std::size_t SyncQueue::high_water() const {
    std::lock_guard lock(mu_);
    return high_water_;
}

bool SyncQueue::closed() const {
    std::lock_guard lock(mu_);
    return closed_;
}

Switchboard::Switchboard(OverflowPolicy default_policy, std::size_t queue_bound)
    : default_policy_(default_policy), queue_bound_(queue_bound) {}

std::shared_ptr<detail::TopicState> Switchboard::create_erased(std::string name, std::type_index kind) {
    if (name.empty()) throw ConfigError("switchboard: topic name must not be empty");
    std::lock_guard lock(registry_mu_);
    if (topics_.contains(name)) throw ConfigError("switchboard: duplicate topic '" + name + "'");
    auto state = std::make_shared<detail::TopicState>(name, kind);
    topics_.emplace(std::move(name), state);
    return state;
}

std::shared_ptr<detail::TopicState> Switchboard::find(std::string_view name) const {
    std::lock_guard lock(registry_mu_);
    auto it = topics_.find(name);
    if (it == topics_.end()) throw ConfigError("switchboard: unknown topic '" + std::string(name) + "'");
    return it->second;
}

bool Switchboard::has_topic(std::string_view name) const {
    std::lock_guard lock(registry_mu_);
    return topics_.find(name) != topics_.end();
}

std::vector<std::string> Switchboard::topic_names() const {
    std::lock_guard lock(registry_mu_);
    std::vector<std::string> names;
    names.reserve(topics_.size());
    for (const auto& [name, _] : topics_) names.push_back(name);
    return names;
}

std::type_index Switchboard::kind_of(std::string_view name) const { return find(name)->kind; }

void Switchboard::bind_writer(std::string_view topic, const std::string& owner) {
    auto state = find(topic);
    std::lock_guard lock(state->write_mu);
    if (state->writer && *state->writer != owner)
        throw WriterConflictError("switchboard: topic '" + state->name + "' already written by '" + *state->writer +
                                  "', cannot bind '" + owner + "'");
    state->writer = owner;
}

std::optional<std::string> Switchboard::writer_of(std::string_view topic) const {
    auto state = find(topic);
    std::lock_guard lock(state->write_mu);
    return state->writer;
}

void Switchboard::publish_erased(detail::TopicState& topic, std::string_view writer,
                                 std::shared_ptr<const void> value, Timestamp ts) {
    std::vector<std::shared_ptr<SyncQueue>> targets;
    AnyEvent ev;
    {
        std::lock_guard lock(topic.write_mu);
        if (!topic.writer || *topic.writer != writer)
            throw PermissionError("switchboard: '" + std::string(writer) + "' is not the writer of '" + topic.name +
                                  "'");
        if (topic.last_ts && ts < *topic.last_ts)
            throw OrderingError("switchboard: timestamp regression on '" + topic.name + "'");
        topic.last_ts = ts;
        ev = AnyEvent{ts, ++topic.seq, std::move(value)};

        targets.reserve(topic.readers.size());
        auto& rs = topic.readers;
        rs.erase(std::remove_if(rs.begin(), rs.end(),
                                [&](const std::weak_ptr<SyncQueue>& w) {
                                    auto q = w.lock();
                                    if (!q || q->closed()) return true;
                                    targets.push_back(std::move(q));
                                    return false;
                                }),
                 rs.end());

        std::lock_guard latest_lock(topic.latest_mu);
        topic.latest = ev;
    }
    // Outside the write lock; order holds because there is one writer context.
    for (auto& q : targets) q->push(ev);
}

std::optional<AnyEvent> Switchboard::read_latest_erased(const detail::TopicState& topic) const {
    std::lock_guard lock(topic.latest_mu);
    return topic.latest;
}

std::shared_ptr<SyncQueue> Switchboard::subscribe_erased(detail::TopicState& topic,
                                                         std::optional<OverflowPolicy> policy) {
    auto q = std::make_shared<SyncQueue>(queue_bound_, policy.value_or(default_policy_));
    std::lock_guard lock(topic.write_mu);
    topic.readers.push_back(q);
    return q;
}

}  // namespace xrsim
