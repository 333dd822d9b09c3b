#include "xrsim/runtime/time.hpp"

#include "xrsim/runtime/errors.hpp"

namespace xrsim {

Period Period::from_hz(std::int64_t hz) {
    if (hz <= 0) throw ConfigError("period: rate must be positive");
    return Period(1'000'000'000, hz);
}

Period Period::from_duration(Duration d) {
    if (d.ns <= 0) throw ConfigError("period: duration must be positive");
    return Period(d.ns, 1);
}

std::int64_t Period::first_slot_at_or_after(Timestamp t) const {
    if (t.ns <= 0) return 0;
    // slot(k) >= t  <=>  floor(k*num/den) >= t  <=>  k*num >= t*den
    const std::int64_t lhs = t.ns * den_;
    return (lhs + num_ns_ - 1) / num_ns_;
}

std::int64_t Period::last_slot_at_or_before(Timestamp t) const {
    if (t.ns < 0) return -1;
    // floor(k*num/den) <= t  <=>  k*num < (t+1)*den
    const std::int64_t lhs = (t.ns + 1) * den_;
    return (lhs - 1) / num_ns_;
}

Duration Period::nominal() const {
    return Duration{(num_ns_ + den_ / 2) / den_};
}

}  // namespace xrsim
