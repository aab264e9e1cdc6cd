#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace szzkit {

// All timestamps are UTC with second precision.
using Timestamp = std::chrono::sys_seconds;

inline constexpr std::int64_t kSecondsPerDay = 86400;

[[nodiscard]] inline Timestamp from_unix(std::int64_t seconds) {
  return Timestamp{std::chrono::seconds{seconds}};
}

[[nodiscard]] inline std::int64_t to_unix(Timestamp t) { return t.time_since_epoch().count(); }

[[nodiscard]] inline Timestamp add_days(Timestamp t, std::int64_t days) {
  return t + std::chrono::seconds{days * kSecondsPerDay};
}

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.fff]]" with an optional zone suffix
// "Z", "+HH:MM", "+HHMM" or "+HH". A missing zone means UTC.
[[nodiscard]] std::optional<Timestamp> parse_iso8601(std::string_view text);

// "2020-01-31T12:00:00Z"
[[nodiscard]] std::string format_iso8601(Timestamp t);

// "2020-01-31"
[[nodiscard]] std::string format_date(Timestamp t);

[[nodiscard]] double days_between(Timestamp from, Timestamp to);

}  // namespace szzkit
