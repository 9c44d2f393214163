#include "nino/time.hpp"

#include <charconv>
#include <cstdio>

#include "nino/error.hpp"

namespace nino {

TimeStamp::TimeStamp(int y, int m) : year(y), month(m) {
  if (m < 1 || m > 12) fail(ErrorKind::FormatError, "month out of range: " + std::to_string(m));
}

TimeStamp TimeStamp::from_serial(long serial) {
  long y = serial / 12;
  long m = serial % 12;
  if (m < 0) {
    m += 12;
    y -= 1;
  }
  return TimeStamp(static_cast<int>(y), static_cast<int>(m) + 1);
}

std::string TimeStamp::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

TimeStamp TimeStamp::parse(std::string_view text) {
  auto dash = text.find('-', 1);
  if (dash == std::string_view::npos) fail(ErrorKind::FormatError, "expected YYYY-MM, got '" + std::string(text) + "'");
  int y = 0;
  int m = 0;
  auto ys = text.substr(0, dash);
  auto ms = text.substr(dash + 1);
  auto ry = std::from_chars(ys.data(), ys.data() + ys.size(), y);
  auto rm = std::from_chars(ms.data(), ms.data() + ms.size(), m);
  if (ry.ec != std::errc{} || ry.ptr != ys.data() + ys.size() || rm.ec != std::errc{} ||
      rm.ptr != ms.data() + ms.size() || ms.size() != 2) {
    fail(ErrorKind::FormatError, "expected YYYY-MM, got '" + std::string(text) + "'");
  }
  return TimeStamp(y, m);
}

std::string Period::str() const { return first.str() + ":" + last.str(); }

Period Period::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) fail(ErrorKind::FormatError, "expected YYYY-MM:YYYY-MM");
  Period p{TimeStamp::parse(text.substr(0, colon)), TimeStamp::parse(text.substr(colon + 1))};
  if (p.last < p.first) fail(ErrorKind::FormatError, "period end precedes start: " + std::string(text));
  return p;
}

}  // namespace nino
