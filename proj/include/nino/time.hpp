#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace nino {

/// Calendar month. Ordered by (year, month).
struct TimeStamp {
  int year = 2000;
  int month = 1;  // 1..12

  TimeStamp() = default;
  TimeStamp(int y, int m);

  auto operator<=>(const TimeStamp&) const = default;

  /// Months since 0000-01; makes month arithmetic trivial.
  long serial() const noexcept { return static_cast<long>(year) * 12 + (month - 1); }
  static TimeStamp from_serial(long serial);

  TimeStamp plus_months(long n) const { return from_serial(serial() + n); }
  TimeStamp next() const { return plus_months(1); }

  /// `YYYY-MM`
  std::string str() const;
  static TimeStamp parse(std::string_view text);
};

/// Signed month distance b - a.
inline long months_between(const TimeStamp& a, const TimeStamp& b) { return b.serial() - a.serial(); }

/// Inclusive month interval.
struct Period {
  TimeStamp first;
  TimeStamp last;

  long months() const { return months_between(first, last) + 1; }
  bool contains(const TimeStamp& t) const { return first <= t && t <= last; }

  /// `YYYY-MM:YYYY-MM`
  std::string str() const;
  static Period parse(std::string_view text);
};

}  // namespace nino
