#ifndef SUBMSS_SIM_TIME_HPP
#define SUBMSS_SIM_TIME_HPP

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace submss {

// 128-bit intermediate for products of nanoseconds and byte counts.
__extension__ using Int128 = __int128;

// Integer nanosecond virtual time. Also used for durations.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime ns(std::int64_t v) { return SimTime(v); }
  static constexpr SimTime us(std::int64_t v) { return SimTime(v * 1'000); }
  static constexpr SimTime ms(std::int64_t v) { return SimTime(v * 1'000'000); }
  static constexpr SimTime s(std::int64_t v) { return SimTime(v * 1'000'000'000); }
  static constexpr SimTime zero() { return SimTime(0); }
  static constexpr SimTime max() {
    return SimTime(std::numeric_limits<std::int64_t>::max());
  }

  constexpr std::int64_t count() const { return ns_; }
  constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }
  constexpr double millis() const { return static_cast<double>(ns_) * 1e-6; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const { return SimTime(ns_ + o.ns_); }
  constexpr SimTime operator-(SimTime o) const { return SimTime(ns_ - o.ns_); }
  constexpr SimTime& operator+=(SimTime o) {
    ns_ += o.ns_;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime o) {
    ns_ -= o.ns_;
    return *this;
  }
  constexpr SimTime operator*(std::int64_t k) const { return SimTime(ns_ * k); }
  constexpr SimTime operator/(std::int64_t k) const { return SimTime(ns_ / k); }

 private:
  constexpr explicit SimTime(std::int64_t v) : ns_(v) {}
  std::int64_t ns_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, SimTime t) {
  return os << t.count() << "ns";
}

// floor(num/den + 1/2) for num >= 0, den > 0, without intermediate rounding.
constexpr std::int64_t div_round_half_up(Int128 num, Int128 den) {
  if (den <= 0 || num < 0) {
    throw std::domain_error("div_round_half_up: requires num >= 0, den > 0");
  }
  return static_cast<std::int64_t>((2 * num + den) / (2 * den));
}

// Time to clock `bytes` onto a link of `bits_per_second`, rounded half up.
constexpr SimTime serialization_time(std::int64_t bytes,
                                     std::int64_t bits_per_second) {
  return SimTime::ns(div_round_half_up(
      static_cast<Int128>(bytes) * 8 * 1'000'000'000, bits_per_second));
}

// Bytes that drain from a link of the given rate in `t` (floor).
constexpr std::int64_t bytes_in(SimTime t, std::int64_t bits_per_second) {
  return static_cast<std::int64_t>(static_cast<Int128>(t.count()) *
                                   bits_per_second / 8 / 1'000'000'000);
}

}  // namespace submss

#endif  // SUBMSS_SIM_TIME_HPP
