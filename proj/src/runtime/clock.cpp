#include "xrsim/runtime/clock.hpp"

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

Clock Clock::simulated(Duration sim_step) {
    if (sim_step.ns <= 0) throw ConfigError("clock: sim_step must be positive");
    return Clock(ClockMode::simulated, sim_step);
}

Clock Clock::wall() { return Clock(ClockMode::wall, Duration{}); }

Timestamp Clock::now() const {
    if (mode_ == ClockMode::simulated) return sim_now_;
    const auto d = std::chrono::steady_clock::now() - epoch_;
    return Timestamp{std::chrono::duration_cast<std::chrono::nanoseconds>(d).count()};
}

void Clock::advance(Duration d) {
    if (mode_ != ClockMode::simulated) throw ConfigError("clock: cannot step a wall clock");
    if (d.ns < 0) throw OrderingError("clock: negative step");
    sim_now_ = sim_now_ + d;
}

void Clock::advance_to(Timestamp t) {
    if (mode_ != ClockMode::simulated) throw ConfigError("clock: cannot step a wall clock");
    if (t < sim_now_) throw OrderingError("clock: time may not go backwards");
    sim_now_ = t;
}

void Clock::start() {
    sim_now_ = Timestamp{};
    epoch_ = std::chrono::steady_clock::now();
}

}  // namespace xrsim
