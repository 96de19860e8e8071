// time.hpp - simulation clock with fixed micro-minute resolution
#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>

namespace saev {

// One tick = 1e-6 minutes. Integer timestamps keep event ordering exact and
// runs bit-reproducible; doubles are only used at the boundaries.
class SimTime {
 public:
  static constexpr std::int64_t kTicksPerMinute = 1'000'000;

  constexpr SimTime() = default;
  static constexpr SimTime from_ticks(std::int64_t t) { return SimTime{t}; }
  static SimTime from_minutes(double m) {
    return SimTime{static_cast<std::int64_t>(std::llround(m * kTicksPerMinute))};
  }
  static constexpr SimTime zero() { return SimTime{0}; }

  [[nodiscard]] constexpr std::int64_t ticks() const { return ticks_; }
  [[nodiscard]] constexpr double minutes() const {
    return static_cast<double>(ticks_) / kTicksPerMinute;
  }

  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.ticks_ + b.ticks_}; }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.ticks_ - b.ticks_}; }
  constexpr SimTime& operator+=(SimTime o) { ticks_ += o.ticks_; return *this; }
  friend constexpr auto operator<=>(SimTime, SimTime) = default;

 private:
  constexpr explicit SimTime(std::int64_t t) : ticks_(t) {}
  std::int64_t ticks_ = 0;
};

// Durations share the representation; costs C_vc are durations in minutes.
using SimDuration = SimTime;

inline SimTime scale(double factor, SimTime d) {
  return SimTime::from_ticks(
      static_cast<std::int64_t>(std::llround(factor * static_cast<double>(d.ticks()))));
}

inline std::string format_minutes(SimTime t) {
  char buf[40];
  std::int64_t ticks = t.ticks();
  const char* sign = ticks < 0 ? "-" : "";
  if (ticks < 0) ticks = -ticks;
  std::snprintf(buf, sizeof(buf), "%s%lld.%06lld", sign,
                static_cast<long long>(ticks / SimTime::kTicksPerMinute),
                static_cast<long long>(ticks % SimTime::kTicksPerMinute));
  return buf;
}

}  // namespace saev
