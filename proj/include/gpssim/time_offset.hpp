#pragma once

/**
 * @file time_offset.hpp
 * @brief Signed time offsets at nanosecond resolution and the additive
 *        clock-error chain of a simulator-based positioning system.
 *
 * The four time scales involved are GPS time, the reference server, the
 * simulator host clock and the simulated satellite clock. Every error
 * component is a pairwise difference between two adjacent scales, so the
 * end-to-end error is an exact integer sum.
 */

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <ostream>

namespace gpssim {

/// Signed duration stored as an integer nanosecond count. Arithmetic is
/// exact; the representable range is about +/-292 years.
class TimeOffset {
 public:
  constexpr TimeOffset() = default;

  static constexpr TimeOffset from_ns(std::int64_t ns) { return TimeOffset(ns); }
  static constexpr TimeOffset from_us(std::int64_t us) { return TimeOffset(us * 1'000); }
  static constexpr TimeOffset from_ms(std::int64_t ms) { return TimeOffset(ms * 1'000'000); }
  static constexpr TimeOffset from_s(std::int64_t s) { return TimeOffset(s * 1'000'000'000); }

  /// Rounds to the nearest nanosecond.
  static TimeOffset from_seconds(double s) {
    return TimeOffset(static_cast<std::int64_t>(std::llround(s * 1e9)));
  }
  static TimeOffset from_millis(double ms) {
    return TimeOffset(static_cast<std::int64_t>(std::llround(ms * 1e6)));
  }

  constexpr std::int64_t ns() const { return ns_; }
  constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }
  constexpr double millis() const { return static_cast<double>(ns_) * 1e-6; }

  constexpr TimeOffset abs() const { return TimeOffset(ns_ < 0 ? -ns_ : ns_); }
  constexpr bool is_zero() const { return ns_ == 0; }

  constexpr TimeOffset operator-() const { return TimeOffset(-ns_); }
  constexpr TimeOffset& operator+=(TimeOffset o) {
    ns_ += o.ns_;
    return *this;
  }
  constexpr TimeOffset& operator-=(TimeOffset o) {
    ns_ -= o.ns_;
    return *this;
  }
  friend constexpr TimeOffset operator+(TimeOffset a, TimeOffset b) { return a += b; }
  friend constexpr TimeOffset operator-(TimeOffset a, TimeOffset b) { return a -= b; }
  friend constexpr TimeOffset operator*(TimeOffset a, std::int64_t k) { return TimeOffset(a.ns_ * k); }
  friend constexpr TimeOffset operator*(std::int64_t k, TimeOffset a) { return TimeOffset(a.ns_ * k); }
  /// Truncates toward zero.
  friend constexpr TimeOffset operator/(TimeOffset a, std::int64_t k) { return TimeOffset(a.ns_ / k); }
  friend constexpr std::int64_t operator/(TimeOffset a, TimeOffset b) { return a.ns_ / b.ns_; }
  friend constexpr TimeOffset operator%(TimeOffset a, TimeOffset b) { return TimeOffset(a.ns_ % b.ns_); }

  friend constexpr auto operator<=>(TimeOffset, TimeOffset) = default;

  friend std::ostream& operator<<(std::ostream& os, TimeOffset t) { return os << t.millis() << " ms"; }

 private:
  constexpr explicit TimeOffset(std::int64_t ns) : ns_(ns) {}
  std::int64_t ns_ = 0;
};

/// Non-negative durations share the representation.
using Duration = TimeOffset;

constexpr TimeOffset max(TimeOffset a, TimeOffset b) { return a < b ? b : a; }
constexpr TimeOffset min(TimeOffset a, TimeOffset b) { return a < b ? a : b; }

/// The three additive error components between GPS time and the simulated
/// satellite time.
struct ClockChain {
  TimeOffset delta_sim;  ///< simulation-process delay (positive when the simulated signal lags)
  TimeOffset delta_ntp;  ///< simulator host time minus reference server time
  TimeOffset delta_ref;  ///< reference server time minus GPS time
};

/// System-wide clock error: the plain sum of the three components.
constexpr TimeOffset compose_clock_error(const ClockChain& chain) {
  return chain.delta_sim + chain.delta_ntp + chain.delta_ref;
}

/// Symmetric, boundary-inclusive clock error budget.
class ErrorBudget {
 public:
  /// Throws std::invalid_argument unless limit > 0.
  explicit ErrorBudget(TimeOffset limit = TimeOffset::from_ms(50));

  TimeOffset limit() const { return limit_; }

 private:
  TimeOffset limit_;
};

/// True iff |error| <= budget.limit().
bool within_budget(TimeOffset error, const ErrorBudget& budget);

}  // namespace gpssim
