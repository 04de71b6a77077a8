#pragma once

#include <compare>
#include <cstdint>

namespace cloudmarket {

// Virtual time as a count of microseconds. All duration arithmetic is
// integer-exact; rate-to-duration conversions round up to the next
// microsecond so completion estimates are never optimistic.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime micros(std::uint64_t us) { return SimTime{us}; }
    static constexpr SimTime millis(std::uint64_t ms) { return SimTime{ms * 1000u}; }
    static constexpr SimTime seconds(std::uint64_t s) { return SimTime{s * 1'000'000u}; }

    // Decimal seconds from a config file, rounded half-up to a microsecond.
    static SimTime from_seconds(double s) {
        return SimTime{static_cast<std::uint64_t>(s * 1e6 + 0.5)};
    }

    constexpr std::uint64_t us() const { return us_; }
    constexpr double to_seconds() const { return static_cast<double>(us_) / 1e6; }

    // Whole seconds, rounded up. Used for lateness and billing granularity.
    constexpr std::uint64_t ceil_seconds() const {
        return (us_ + 999'999u) / 1'000'000u;
    }
    constexpr std::uint64_t ceil_hours() const {
        return (us_ + 3'599'999'999u) / 3'600'000'000u;
    }

    constexpr SimTime operator+(SimTime rhs) const { return SimTime{us_ + rhs.us_}; }
    constexpr SimTime operator-(SimTime rhs) const { return SimTime{us_ - rhs.us_}; }
    SimTime& operator+=(SimTime rhs) {
        us_ += rhs.us_;
        return *this;
    }
    constexpr auto operator<=>(const SimTime&) const = default;

private:
    constexpr explicit SimTime(std::uint64_t us) : us_(us) {}

    std::uint64_t us_ = 0;
};

}  // namespace cloudmarket
