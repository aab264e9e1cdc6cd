#include "szzkit/common/time.hpp"

#include <cctype>

#include <fmt/format.h>

namespace szzkit {
namespace {

// Howard Hinnant's civil-date conversions.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2 ? 1 : 0;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  std::int64_t year;
  unsigned month;
  unsigned day;
};

constexpr Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2 ? 1 : 0), m, d};
}

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  void skip() { ++pos_; }

  bool expect(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  std::optional<int> digits(std::size_t count) {
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (done() || !std::isdigit(static_cast<unsigned char>(peek()))) return std::nullopt;
      value = value * 10 + (peek() - '0');
      ++pos_;
    }
    return value;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  Cursor c{text};
  auto year = c.digits(4);
  if (!year || !c.expect('-')) return std::nullopt;
  auto month = c.digits(2);
  if (!month || !c.expect('-')) return std::nullopt;
  auto day = c.digits(2);
  if (!day || *month < 1 || *month > 12 || *day < 1 || *day > 31) return std::nullopt;

  int hour = 0, minute = 0, second = 0;
  if (c.peek() == 'T' || c.peek() == ' ') {
    c.skip();
    auto h = c.digits(2);
    if (!h || !c.expect(':')) return std::nullopt;
    auto mi = c.digits(2);
    if (!mi) return std::nullopt;
    hour = *h;
    minute = *mi;
    if (c.expect(':')) {
      auto s = c.digits(2);
      if (!s) return std::nullopt;
      second = *s;
      if (c.expect('.')) {
        while (std::isdigit(static_cast<unsigned char>(c.peek()))) c.skip();
      }
    }
  }
  if (hour > 23 || minute > 59 || second > 60) return std::nullopt;

  std::int64_t offset = 0;
  if (c.expect('Z')) {
  } else if (c.peek() == '+' || c.peek() == '-') {
    const int sign = c.peek() == '-' ? -1 : 1;
    c.skip();
    auto oh = c.digits(2);
    if (!oh) return std::nullopt;
    int om = 0;
    c.expect(':');
    if (!c.done()) {
      auto m = c.digits(2);
      if (!m) return std::nullopt;
      om = *m;
    }
    offset = sign * (static_cast<std::int64_t>(*oh) * 3600 + om * 60);
  }
  if (!c.done()) return std::nullopt;

  const std::int64_t days = days_from_civil(*year, static_cast<unsigned>(*month), static_cast<unsigned>(*day));
  const std::int64_t secs = days * kSecondsPerDay + hour * 3600 + minute * 60 + second - offset;
  return from_unix(secs);
}

std::string format_iso8601(Timestamp t) {
  const std::int64_t secs = to_unix(t);
  std::int64_t days = secs / kSecondsPerDay;
  std::int64_t rem = secs % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  const Civil cd = civil_from_days(days);
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", cd.year, cd.month, cd.day, rem / 3600,
                     (rem % 3600) / 60, rem % 60);
}

std::string format_date(Timestamp t) { return format_iso8601(t).substr(0, 10); }

double days_between(Timestamp from, Timestamp to) {
  return static_cast<double>(to_unix(to) - to_unix(from)) / static_cast<double>(kSecondsPerDay);
}

}  // namespace szzkit
