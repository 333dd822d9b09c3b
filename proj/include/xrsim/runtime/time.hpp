#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace xrsim {

/// Signed span of time in integer nanoseconds.
struct Duration {
    std::int64_t ns = 0;

    static constexpr Duration nanos(std::int64_t v) { return Duration{v}; }
    static constexpr Duration micros(std::int64_t v) { return Duration{v * 1000}; }
    static Duration millis(double v) { return Duration{static_cast<std::int64_t>(std::llround(v * 1e6))}; }
    static Duration seconds(double v) { return Duration{static_cast<std::int64_t>(std::llround(v * 1e9))}; }

    constexpr double ms() const { return static_cast<double>(ns) * 1e-6; }
    constexpr double sec() const { return static_cast<double>(ns) * 1e-9; }

    constexpr auto operator<=>(const Duration&) const = default;
    constexpr Duration operator+(Duration o) const { return {ns + o.ns}; }
    constexpr Duration operator-(Duration o) const { return {ns - o.ns}; }
    constexpr Duration operator*(std::int64_t k) const { return {ns * k}; }
    constexpr Duration& operator+=(Duration o) { ns += o.ns; return *this; }
};

/// Point in time, nanoseconds since session start.
struct Timestamp {
    std::int64_t ns = 0;

    static Timestamp from_seconds(double s) { return Timestamp{static_cast<std::int64_t>(std::llround(s * 1e9))}; }
    constexpr double sec() const { return static_cast<double>(ns) * 1e-9; }

    constexpr auto operator<=>(const Timestamp&) const = default;
    constexpr Timestamp operator+(Duration d) const { return {ns + d.ns}; }
    constexpr Timestamp operator-(Duration d) const { return {ns - d.ns}; }
    constexpr Duration operator-(Timestamp o) const { return {ns - o.ns}; }
};

/// Exact rational period: slot k begins at floor(k * num_ns / den).
///
/// Rates such as 15 Hz or 120 Hz do not have an integer-nanosecond period;
/// keeping the ratio avoids the drift a rounded period would accumulate.
class Period {
public:
    static Period from_hz(std::int64_t hz);
    static Period from_duration(Duration d);

    Timestamp slot(std::int64_t k) const { return Timestamp{k * num_ns_ / den_}; }
    /// Smallest k with slot(k) >= t.
    std::int64_t first_slot_at_or_after(Timestamp t) const;
    /// Largest k with slot(k) <= t (t >= 0).
    std::int64_t last_slot_at_or_before(Timestamp t) const;
    /// Number of slots in [0, horizon).
    std::int64_t slots_before(Timestamp horizon) const { return first_slot_at_or_after(horizon); }

    /// Nominal period rounded to the nearest nanosecond.
    Duration nominal() const;
    double hz() const { return 1e9 * static_cast<double>(den_) / static_cast<double>(num_ns_); }

    std::int64_t numerator_ns() const { return num_ns_; }
    std::int64_t denominator() const { return den_; }

    bool operator==(const Period&) const = default;

private:
    Period(std::int64_t num, std::int64_t den) : num_ns_(num), den_(den) {}
    std::int64_t num_ns_;
    std::int64_t den_;
};

}  // namespace xrsim
