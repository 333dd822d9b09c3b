#pragma once

#include <cstdint>
#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "xrsim/runtime/clock.hpp"
#include "xrsim/runtime/plugin.hpp"
#include "xrsim/runtime/switchboard.hpp"

namespace xrsim {

/// Raised when a plugin callback throws; carries the trace recorded so far.
class RunAborted : public Error {
public:
    RunAborted(const std::string& what, std::vector<InvocationRecord> partial, std::exception_ptr cause)
        : Error(what), partial_trace(std::move(partial)), cause(std::move(cause)) {}

    std::vector<InvocationRecord> partial_trace;
    std::exception_ptr cause;
};

/// Plugin registry plus deadline-aware scheduler.
///
/// Periodic plugins fire at every multiple of their period. A periodic
/// plugin that is still running when its next slot arrives skips that slot
/// (recorded with skipped=true). Triggered plugins run once per input on
/// their trigger topic, in order, and are never preempted; inputs that
/// arrive while one is running queue up behind it.
///
/// Simulated mode is a single-threaded discrete-event loop whose timeline
/// depends only on registration order, cost models and the seed. Events at
/// the same instant run completions first, then triggered starts, then
/// periodic slots; ties within a class go by registration order.
class Runtime {
public:
    explicit Runtime(std::shared_ptr<Switchboard> sb = std::make_shared<Switchboard>());

    Switchboard& switchboard() { return *sb_; }
    const std::shared_ptr<Switchboard>& switchboard_ptr() const { return sb_; }

    /// Validates topics, binds declared writes, and appends the plugin.
    void register_plugin(PluginDescriptor desc);
    const std::vector<PluginDescriptor>& plugins() const { return plugins_; }

    /// Throws ConfigError if synchronous edges form a cycle.
    void check_acyclic() const;

    /// Executes every plugin for `duration`; returns the trace sorted by
    /// (start, registration order, seq).
    std::vector<InvocationRecord> run(Clock& clock, Duration duration, std::uint64_t seed = 0);

private:
    std::vector<InvocationRecord> run_simulated(Clock& clock, Duration duration, std::uint64_t seed);
    std::vector<InvocationRecord> run_wall(Clock& clock, Duration duration, std::uint64_t seed);
    void sort_trace(std::vector<InvocationRecord>& trace) const;

    std::shared_ptr<Switchboard> sb_;
    std::vector<PluginDescriptor> plugins_;
    bool ran_ = false;
};

/// Seeds one independent generator per plugin.
std::uint64_t plugin_seed(std::uint64_t session_seed, std::size_t plugin_index);

}  // namespace xrsim
