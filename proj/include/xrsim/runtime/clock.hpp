#pragma once

#include <chrono>

#include "xrsim/runtime/time.hpp"

namespace xrsim {

enum class ClockMode { simulated, wall };

/// Session time source.
///
/// Simulated clocks only move when stepped; wall clocks report steady-clock
/// time since `start()`.
class Clock {
public:
    static Clock simulated(Duration sim_step = Duration::millis(1.0));
    static Clock wall();

    ClockMode mode() const { return mode_; }
    Duration sim_step() const { return sim_step_; }

    Timestamp now() const;

    /// Simulated mode only.
    void advance(Duration d);
    /// Simulated mode only; time may not go backwards.
    void advance_to(Timestamp t);
    /// Advance by one `sim_step`.
    void step() { advance(sim_step_); }

    /// Wall mode: sets the epoch. Simulated mode: resets time to zero.
    void start();
    std::chrono::steady_clock::time_point epoch() const { return epoch_; }

private:
    Clock(ClockMode mode, Duration step) : mode_(mode), sim_step_(step) {}

    ClockMode mode_;
    Duration sim_step_;
    Timestamp sim_now_{};
    std::chrono::steady_clock::time_point epoch_ = std::chrono::steady_clock::now();
};

}  // namespace xrsim
